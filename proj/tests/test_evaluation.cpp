#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tune/evaluation.hpp"
#include "tune/rng.hpp"
#include "tune/synth.hpp"

using namespace tune;

namespace {

LabeledDataset column_dataset(std::vector<double> column) {
  LabeledDataset data;
  data.n_rows = column.size();
  data.n_features = 1;
  data.feature_names = {"x"};
  data.features = std::move(column);
  data.labels.assign(data.n_rows, "A");
  return data;
}

//! Independent O(n * classes) counting oracle for accuracy/precision/recall/f1.
struct OracleMetrics {
  double accuracy;
  std::map<std::string, ClassMetrics> per_class;
};

OracleMetrics metrics_oracle(const std::vector<std::string>& truth,
                             const std::vector<std::string>& pred) {
  OracleMetrics out{};
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == pred[i] ? 1 : 0;
  out.accuracy = static_cast<double>(hits) / static_cast<double>(truth.size());

  std::set<std::string> classes(truth.begin(), truth.end());
  classes.insert(pred.begin(), pred.end());
  for (const auto& c : classes) {
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (pred[i] == c && truth[i] == c) ++tp;
      if (pred[i] == c && truth[i] != c) ++fp;
      if (pred[i] != c && truth[i] == c) ++fn;
    }
    ClassMetrics m;
    m.precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall)
                                      : 0.0;
    out.per_class[c] = m;
  }
  return out;
}

} // namespace

TEST(MinMax, AffineEndpoints) {
  NormalizationModel model = minmax_fit(column_dataset({2, 4, 6}));
  LabeledDataset out = minmax_apply(model, column_dataset({2, 4, 6}));
  EXPECT_DOUBLE_EQ(out.at(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(out.at(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(out.at(2, 0), 1.0);
}

TEST(MinMax, ConstantColumnMapsToZero) {
  NormalizationModel model = minmax_fit(column_dataset({7, 7}));
  LabeledDataset out = minmax_apply(model, column_dataset({7, 7}));
  EXPECT_DOUBLE_EQ(out.at(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(out.at(1, 0), 0.0);
}

TEST(MinMax, ExtrapolatesOutsideTrainingRange) {
  NormalizationModel model = minmax_fit(column_dataset({0, 10}));
  LabeledDataset out = minmax_apply(model, column_dataset({15}));
  EXPECT_DOUBLE_EQ(out.at(0, 0), 1.5);
}

TEST(MinMax, TrainingValuesLandInUnitInterval) {
  RandomStream rng(5);
  LabeledDataset data;
  data.n_rows = 200;
  data.n_features = 4;
  data.feature_names = {"a", "b", "c", "d"};
  for (std::size_t i = 0; i < data.n_rows * data.n_features; ++i)
    data.features.push_back(rng.uniform_real(-100.0, 100.0));
  data.labels.assign(data.n_rows, "A");
  LabeledDataset out = minmax_apply(minmax_fit(data), data);
  for (double v : out.features) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(MinMax, EmptyMatrixRejected) {
  LabeledDataset empty;
  EXPECT_THROW(minmax_fit(empty), Error);
}

TEST(Holdout, ProportionalCounts) {
  LabeledDataset data;
  data.n_rows = 100;
  data.n_features = 1;
  data.feature_names = {"x"};
  for (int i = 0; i < 100; ++i) {
    data.features.push_back(i);
    data.labels.push_back(i < 60 ? "A" : "B");
  }
  HoldoutSplit split = stratified_holdout(data, 0.2, 1);
  EXPECT_EQ(split.test_indices.size(), 20u);
  EXPECT_EQ(split.train_indices.size(), 80u);
  std::size_t test_a = 0;
  for (std::size_t r : split.test_indices) test_a += data.labels[r] == "A";
  EXPECT_EQ(test_a, 12u);
}

TEST(Holdout, Elec2ScaleTwentyPercent) {
  LabeledDataset data = make_synthetic_elec2(45312, 7);
  HoldoutSplit split = stratified_holdout(data, 0.2, 3);
  EXPECT_NEAR(static_cast<double>(split.test_indices.size()), 9062.0, 2.0);
  EXPECT_EQ(split.test_indices.size() + split.train_indices.size(), 45312u);
}

TEST(Holdout, DeterministicAndDisjoint) {
  LabeledDataset data = make_synthetic_elec2(1000, 2);
  HoldoutSplit a = stratified_holdout(data, 0.2, 11);
  HoldoutSplit b = stratified_holdout(data, 0.2, 11);
  EXPECT_EQ(a.train_indices, b.train_indices);
  EXPECT_EQ(a.test_indices, b.test_indices);
  std::set<std::size_t> all(a.train_indices.begin(), a.train_indices.end());
  all.insert(a.test_indices.begin(), a.test_indices.end());
  EXPECT_EQ(all.size(), 1000u);
}

TEST(Holdout, SingleRowClassRejected) {
  LabeledDataset data;
  data.n_rows = 3;
  data.n_features = 1;
  data.feature_names = {"x"};
  data.features = {1, 2, 3};
  data.labels = {"A", "A", "B"};
  try {
    stratified_holdout(data, 0.2, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::class_with_single_row);
  }
}

TEST(KFold, EvenPartition) {
  auto folds = kfold_indices(10, 5, 1);
  ASSERT_EQ(folds.size(), 5u);
  for (const auto& f : folds) EXPECT_EQ(f.size(), 2u);
}

TEST(KFold, RemainderDistribution) {
  auto folds = kfold_indices(11, 5, 1);
  std::multiset<std::size_t> sizes;
  for (const auto& f : folds) sizes.insert(f.size());
  EXPECT_EQ(sizes, (std::multiset<std::size_t>{3, 2, 2, 2, 2}));
}

TEST(KFold, PartitionLawOverRandomSizes) {
  RandomStream rng(13);
  for (int round = 0; round < 50; ++round) {
    std::size_t k = 2 + rng.uniform_index(8);
    std::size_t n = k + rng.uniform_index(200);
    auto folds = kfold_indices(n, k, static_cast<std::uint64_t>(round));
    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto& f : folds) {
      total += f.size();
      seen.insert(f.begin(), f.end());
    }
    EXPECT_EQ(total, n);
    EXPECT_EQ(seen.size(), n);
    std::size_t lo = n, hi = 0;
    for (const auto& f : folds) {
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
    }
    EXPECT_LE(hi - lo, 1u);
  }
}

TEST(KFold, KTooLargeRejected) {
  EXPECT_THROW(kfold_indices(3, 5, 1), Error);
  EXPECT_THROW(kfold_indices(10, 1, 1), Error);
}

TEST(Metrics, PerfectPredictions) {
  std::vector<std::string> truth{"A", "B", "A"};
  EvaluationReport r = compute_metrics(truth, truth);
  EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
  for (const auto& [label, m] : r.per_class) {
    EXPECT_DOUBLE_EQ(m.precision, 1.0);
    EXPECT_DOUBLE_EQ(m.recall, 1.0);
    EXPECT_DOUBLE_EQ(m.f1, 1.0);
  }
}

TEST(Metrics, AllWrongBinary) {
  std::vector<std::string> truth{"A", "A", "B", "B"};
  std::vector<std::string> pred{"B", "B", "A", "A"};
  EvaluationReport r = compute_metrics(truth, pred);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.0);
  EXPECT_DOUBLE_EQ(r.per_class.at("A").precision, 0.0);
  EXPECT_DOUBLE_EQ(r.per_class.at("A").recall, 0.0);
  EXPECT_DOUBLE_EQ(r.per_class.at("B").precision, 0.0);
}

TEST(Metrics, HandCountedCase) {
  // confusion for class A: TP=2 FP=1 FN=1 TN=1
  std::vector<std::string> truth{"A", "A", "A", "B", "B"};
  std::vector<std::string> pred{"A", "A", "B", "B", "A"};
  EvaluationReport r = compute_metrics(truth, pred);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.6);
  EXPECT_DOUBLE_EQ(r.per_class.at("A").precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_class.at("A").recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_class.at("A").f1, 2.0 / 3.0);
}

TEST(Metrics, AccuracyEqualsConfusionTrace) {
  RandomStream rng(17);
  for (int round = 0; round < 1000; ++round) {
    std::size_t n = 1 + rng.uniform_index(200);
    std::vector<std::string> truth, pred;
    for (std::size_t i = 0; i < n; ++i) {
      truth.push_back(rng.uniform_index(2) ? "UP" : "DOWN");
      pred.push_back(rng.uniform_index(2) ? "UP" : "DOWN");
    }
    EvaluationReport r = compute_metrics(truth, pred);
    std::int64_t trace = 0, total = 0;
    std::size_t c = r.confusion.labels.size();
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        total += r.confusion.at(i, j);
        if (i == j) trace += r.confusion.at(i, j);
      }
    EXPECT_EQ(total, static_cast<std::int64_t>(n));
    EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(trace) / static_cast<double>(n));
  }
}

TEST(Metrics, MatchesCountingOracleOnRandomInputs) {
  RandomStream rng(19);
  for (int round = 0; round < 1000; ++round) {
    std::size_t n = 1 + rng.uniform_index(200);
    std::vector<std::string> truth, pred;
    for (std::size_t i = 0; i < n; ++i) {
      truth.push_back(rng.uniform_index(2) ? "UP" : "DOWN");
      pred.push_back(rng.uniform_index(2) ? "UP" : "DOWN");
    }
    EvaluationReport got = compute_metrics(truth, pred);
    OracleMetrics want = metrics_oracle(truth, pred);
    EXPECT_DOUBLE_EQ(got.accuracy, want.accuracy);
    for (const auto& [label, m] : want.per_class) {
      EXPECT_DOUBLE_EQ(got.per_class.at(label).precision, m.precision);
      EXPECT_DOUBLE_EQ(got.per_class.at(label).recall, m.recall);
      EXPECT_DOUBLE_EQ(got.per_class.at(label).f1, m.f1);
    }
  }
}

TEST(Metrics, PermutationInvariance) {
  RandomStream rng(23);
  std::vector<std::string> truth, pred;
  for (int i = 0; i < 60; ++i) {
    truth.push_back(rng.uniform_index(3) == 0 ? "A" : (rng.uniform_index(2) ? "B" : "C"));
    pred.push_back(rng.uniform_index(3) == 0 ? "A" : (rng.uniform_index(2) ? "B" : "C"));
  }
  EvaluationReport base = compute_metrics(truth, pred);
  std::vector<std::size_t> order(truth.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(order, rng);
  std::vector<std::string> truth2, pred2;
  for (std::size_t i : order) {
    truth2.push_back(truth[i]);
    pred2.push_back(pred[i]);
  }
  EvaluationReport permuted = compute_metrics(truth2, pred2);
  EXPECT_DOUBLE_EQ(base.accuracy, permuted.accuracy);
  for (const auto& [label, m] : base.per_class)
    EXPECT_DOUBLE_EQ(permuted.per_class.at(label).f1, m.f1);
}

TEST(Metrics, F1BoundedByMaxAndHarmonicMean) {
  RandomStream rng(29);
  for (int round = 0; round < 300; ++round) {
    std::size_t n = 2 + rng.uniform_index(100);
    std::vector<std::string> truth, pred;
    for (std::size_t i = 0; i < n; ++i) {
      truth.push_back(rng.uniform_index(2) ? "UP" : "DOWN");
      pred.push_back(rng.uniform_index(2) ? "UP" : "DOWN");
    }
    EvaluationReport r = compute_metrics(truth, pred);
    for (const auto& [label, m] : r.per_class) {
      EXPECT_LE(m.f1, std::max(m.precision, m.recall) + 1e-12);
      if (m.precision + m.recall > 0)
        EXPECT_NEAR(m.f1, 2 * m.precision * m.recall / (m.precision + m.recall), 1e-12);
    }
  }
}

TEST(Metrics, LengthMismatchAndEmptyRejected) {
  std::vector<std::string> a{"A"}, b{"A", "B"}, empty;
  EXPECT_THROW(compute_metrics(a, b), Error);
  EXPECT_THROW(compute_metrics(empty, empty), Error);
}

TEST(CvObjective, PerfectlyLearnableDataScoresOne) {
  // one feature equals the label indicator
  LabeledDataset data;
  data.n_rows = 60;
  data.n_features = 2;
  data.feature_names = {"noise", "signal"};
  RandomStream rng(31);
  for (std::size_t i = 0; i < data.n_rows; ++i) {
    bool up = i % 2 == 0;
    data.features.push_back(rng.uniform_real(0.0, 1.0));
    data.features.push_back(up ? 1.0 : 0.0);
    data.labels.push_back(up ? "UP" : "DOWN");
  }
  CvObjective objective(data, 5, 7);
  Configuration config({{"n_estimators", std::int64_t{5}},
                        {"max_features", std::int64_t{2}},
                        {"max_depth", std::int64_t{3}},
                        {"criterion", std::string("gini")}});
  EXPECT_DOUBLE_EQ(objective(config), 1.0);
}

TEST(CvObjective, DeterministicPerConfig) {
  LabeledDataset data = make_synthetic_elec2(300, 5);
  CvObjective objective(data, 4, 11);
  Configuration config({{"n_estimators", std::int64_t{10}},
                        {"max_features", std::int64_t{4}},
                        {"max_depth", std::int64_t{5}},
                        {"criterion", std::string("entropy")}});
  double a = objective(config);
  double b = objective(config);
  EXPECT_DOUBLE_EQ(a, b);
  EXPECT_GT(a, 0.4);
  EXPECT_LE(a, 1.0);

  CvObjective rebuilt(data, 4, 11);
  EXPECT_DOUBLE_EQ(rebuilt(config), a);
}

TEST(CvObjective, MaxFeaturesAboveFeatureCountClamps) {
  LabeledDataset data = make_synthetic_elec2(200, 9);
  CvObjective objective(data, 3, 13);
  Configuration config({{"n_estimators", std::int64_t{5}},
                        {"max_features", std::int64_t{10}}, // dataset has 8
                        {"max_depth", std::int64_t{4}},
                        {"criterion", std::string("gini")}});
  EXPECT_NO_THROW(objective(config));
}
