#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tune/dataset.hpp"
#include "tune/error.hpp"
#include "tune/forest.hpp"
#include "tune/rng.hpp"
#include "tune/search_space.hpp"

namespace tune {

//! Per-feature (min, max) fitted on training data.
struct NormalizationModel {
  std::vector<double> mins;
  std::vector<double> maxs;
};

inline NormalizationModel minmax_fit(const LabeledDataset& train) {
  if (train.n_rows == 0 || train.n_features == 0)
    fail(errc::empty_matrix, "minmax_fit on an empty matrix");
  NormalizationModel model;
  model.mins.assign(train.n_features, std::numeric_limits<double>::infinity());
  model.maxs.assign(train.n_features, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < train.n_rows; ++r)
    for (std::size_t f = 0; f < train.n_features; ++f) {
      double v = train.at(r, f);
      model.mins[f] = std::min(model.mins[f], v);
      model.maxs[f] = std::max(model.maxs[f], v);
    }
  return model;
}

//! x' = (x - min) / (max - min); constant features map to 0. Values outside
//! the fitted range extrapolate beyond [0, 1] unclipped.
inline LabeledDataset minmax_apply(const NormalizationModel& model, const LabeledDataset& data) {
  if (data.n_features != model.mins.size())
    fail(errc::dimension_mismatch, "normalization model/feature count mismatch");
  LabeledDataset out = data;
  for (std::size_t f = 0; f < data.n_features; ++f) {
    double range = model.maxs[f] - model.mins[f];
    for (std::size_t r = 0; r < data.n_rows; ++r) {
      double& v = out.features[r * out.n_features + f];
      v = range > 0.0 ? (v - model.mins[f]) / range : 0.0;
    }
  }
  return out;
}

struct HoldoutSplit {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

//! Per-class shuffled split with round-to-nearest class test counts.
inline HoldoutSplit stratified_holdout(const LabeledDataset& data, double test_fraction,
                                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    fail(errc::invalid_value, "test_fraction must be in (0, 1)");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t r = 0; r < data.n_rows; ++r) by_class[data.labels[r]].push_back(r);

  HoldoutSplit split;
  RandomStream root(seed);
  std::size_t class_index = 0;
  for (auto& [label, rows] : by_class) {
    if (rows.size() < 2)
      fail(errc::class_with_single_row, "class '" + label + "' has a single row; cannot stratify");
    RandomStream rng = root.substream("class", class_index++);
    shuffle(rows, rng);
    auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(rows.size())));
    for (std::size_t i = 0; i < rows.size(); ++i)
      (i < n_test ? split.test_indices : split.train_indices).push_back(rows[i]);
  }
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  return split;
}

//! Shuffled partition into k folds with sizes differing by at most one.
inline std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n_rows, std::size_t k,
                                                           std::uint64_t seed) {
  if (k < 2) fail(errc::invalid_value, "k-fold requires k >= 2");
  if (n_rows < k) fail(errc::k_too_large, "k-fold with k > n_rows");
  std::vector<std::size_t> order(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) order[i] = i;
  RandomStream rng(seed);
  shuffle(order, rng);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t base = n_rows / k, extra = n_rows % k, pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    std::size_t size = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return folds;
}

struct ConfusionMatrix {
  std::vector<std::string> labels; // sorted
  std::vector<std::int64_t> cells; // row = true class, col = predicted

  std::int64_t at(std::size_t true_class, std::size_t predicted) const {
    return cells[true_class * labels.size() + predicted];
  }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvaluationReport {
  double accuracy = 0.0;
  std::map<std::string, ClassMetrics> per_class;
  ConfusionMatrix confusion;
  double wall_time_seconds = 0.0;
};

//! Confusion-matrix metrics with each class treated as positive in turn.
//! Zero-denominator precision/recall/f1 are reported as 0.
inline EvaluationReport compute_metrics(std::span<const std::string> truth,
                                        std::span<const std::string> predicted) {
  if (truth.size() != predicted.size())
    fail(errc::length_mismatch, "label vectors have different lengths");
  if (truth.empty()) fail(errc::empty_input, "no samples to evaluate");

  EvaluationReport report;
  auto& labels = report.confusion.labels;
  labels.assign(truth.begin(), truth.end());
  labels.insert(labels.end(), predicted.begin(), predicted.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  auto index_of = [&](const std::string& l) {
    return static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), l) -
                                    labels.begin());
  };

  std::size_t c = labels.size();
  report.confusion.cells.assign(c * c, 0);
  for (std::size_t i = 0; i < truth.size(); ++i)
    ++report.confusion.cells[index_of(truth[i]) * c + index_of(predicted[i])];

  std::int64_t correct = 0;
  for (std::size_t i = 0; i < c; ++i) correct += report.confusion.at(i, i);
  report.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

  for (std::size_t i = 0; i < c; ++i) {
    std::int64_t tp = report.confusion.at(i, i), fp = 0, fn = 0;
    for (std::size_t j = 0; j < c; ++j) {
      if (j == i) continue;
      fp += report.confusion.at(j, i);
      fn += report.confusion.at(i, j);
    }
    ClassMetrics m;
    m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    report.per_class[labels[i]] = m;
  }
  return report;
}

inline double accuracy_score(std::span<const std::string> truth,
                             std::span<const std::string> predicted) {
  if (truth.size() != predicted.size()) fail(errc::length_mismatch, "length mismatch");
  if (truth.empty()) fail(errc::empty_input, "no samples");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i];
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

inline RFHyperParams rf_params_from(const Configuration& config) {
  RFHyperParams hp;
  hp.n_estimators = static_cast<int>(config.get_int("n_estimators"));
  hp.max_features = static_cast<int>(config.get_int("max_features"));
  hp.max_depth = static_cast<int>(config.get_int("max_depth"));
  hp.criterion = criterion_from_string(config.get_string("criterion"));
  return hp;
}

//! Mean k-fold CV accuracy of a random forest trained with the
//! configuration's hyperparameters. Folds, per-fold normalization, and
//! per-fold forest seeds are fixed at construction, so evaluation is a pure
//! function of the configuration and safe to call concurrently.
class CvObjective {
public:
  CvObjective(const LabeledDataset& train_data, std::size_t k, std::uint64_t base_seed)
      : folds_(std::make_shared<std::vector<Fold>>()) {
    RandomStream root(base_seed);
    auto folds = kfold_indices(train_data.n_rows, k, root.substream("folds").seed());
    std::vector<char> in_fold(train_data.n_rows, 0);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::fill(in_fold.begin(), in_fold.end(), 0);
      for (std::size_t r : folds[f]) in_fold[r] = 1;
      std::vector<std::size_t> train_rows;
      train_rows.reserve(train_data.n_rows - folds[f].size());
      for (std::size_t r = 0; r < train_data.n_rows; ++r)
        if (!in_fold[r]) train_rows.push_back(r);

      Fold fold;
      LabeledDataset fit_part = train_data.take_rows(train_rows);
      LabeledDataset valid_part = train_data.take_rows(folds[f]);
      NormalizationModel norm = minmax_fit(fit_part);
      fold.train = minmax_apply(norm, fit_part);
      fold.valid = minmax_apply(norm, valid_part);
      fold.cache = build_training_cache(fold.train);
      fold.valid_label_index.resize(fold.valid.n_rows);
      for (std::size_t r = 0; r < fold.valid.n_rows; ++r) {
        const auto& classes = fold.cache.class_labels;
        auto it = std::lower_bound(classes.begin(), classes.end(), fold.valid.labels[r]);
        fold.valid_label_index[r] =
            it != classes.end() && *it == fold.valid.labels[r]
                ? static_cast<std::int32_t>(it - classes.begin())
                : -1;
      }
      fold.forest_seed = root.substream("fold", f).seed();
      folds_->push_back(std::move(fold));
    }
  }

  double operator()(const Configuration& config) const {
    RFHyperParams hp = rf_params_from(config);
    double total = 0.0;
    for (const auto& fold : *folds_) {
      ForestTrainOptions options;
      options.cache = &fold.cache;
      ForestModel model = train_forest(fold.train, hp, fold.forest_seed, options);
      std::size_t correct = 0;
      for (std::size_t r = 0; r < fold.valid.n_rows; ++r) {
        std::span<const double> row(&fold.valid.features[r * fold.valid.n_features],
                                    fold.valid.n_features);
        correct += predict_class_index(model, row) == fold.valid_label_index[r];
      }
      total += static_cast<double>(correct) / static_cast<double>(fold.valid.n_rows);
    }
    return total / static_cast<double>(folds_->size());
  }

private:
  struct Fold {
    LabeledDataset train;
    LabeledDataset valid;
    TrainingCache cache;
    std::vector<std::int32_t> valid_label_index;
    std::uint64_t forest_seed = 0;
  };
  std::shared_ptr<std::vector<Fold>> folds_;
};

inline CvObjective make_cv_objective(const LabeledDataset& train_data, std::size_t k,
                                     std::uint64_t base_seed) {
  return CvObjective(train_data, k, base_seed);
}

} // namespace tune
