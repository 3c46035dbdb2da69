#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tune/dataset.hpp"
#include "tune/error.hpp"
#include "tune/parallel.hpp"
#include "tune/rng.hpp"

namespace tune {

enum class SplitCriterion { entropy, gini };

inline SplitCriterion criterion_from_string(const std::string& s) {
  if (s == "entropy") return SplitCriterion::entropy;
  if (s == "gini") return SplitCriterion::gini;
  fail(errc::invalid_value, "unknown criterion '" + s + "'");
}

inline const char* criterion_name(SplitCriterion c) {
  return c == SplitCriterion::entropy ? "entropy" : "gini";
}

struct RFHyperParams {
  int n_estimators = 100;
  int max_features = 1;
  int max_depth = 1;
  SplitCriterion criterion = SplitCriterion::gini;

  void validate() const {
    if (n_estimators < 1) fail(errc::invalid_value, "n_estimators must be >= 1");
    if (max_features < 1) fail(errc::invalid_value, "max_features must be >= 1");
    if (max_depth < 1) fail(errc::invalid_value, "max_depth must be >= 1");
  }
};

struct TreeNode {
  double threshold = 0.0;
  std::int32_t feature = -1; // -1 marks a leaf
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t label = -1; // leaf: class index of the majority vote

  bool is_leaf() const { return feature < 0; }
};

//! One CART tree over class indices. `counts` holds the per-node class
//! histogram (n_nodes * n_classes, flattened).
struct DecisionTree {
  std::vector<TreeNode> nodes;
  std::vector<std::int64_t> counts;
  std::size_t n_classes = 0;

  std::int32_t predict_index(std::span<const double> row) const {
    std::int32_t id = 0;
    while (!nodes[static_cast<std::size_t>(id)].is_leaf()) {
      const TreeNode& n = nodes[static_cast<std::size_t>(id)];
      id = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(id)].label;
  }

  //! Longest root-to-leaf path measured in split nodes.
  int split_depth() const {
    int best = 0;
    std::vector<std::pair<std::int32_t, int>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [id, d] = stack.back();
      stack.pop_back();
      const TreeNode& n = nodes[static_cast<std::size_t>(id)];
      if (n.is_leaf()) {
        best = std::max(best, d);
      } else {
        stack.push_back({n.left, d + 1});
        stack.push_back({n.right, d + 1});
      }
    }
    return best;
  }
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  RFHyperParams hyperparams;
  std::vector<std::string> class_labels; // sorted ascending
  std::size_t feature_count = 0;
};

namespace detail {

inline double xlog2(double v) { return v > 0.0 ? v * std::log2(v) : 0.0; }

//! Impurity from integer class counts. `table`, when given, caches
//! k*log2(k) and must extend past the total count.
inline double impurity_from_counts(const std::int64_t* counts, std::size_t n_classes,
                                   SplitCriterion criterion, const double* table) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < n_classes; ++i) total += counts[i];
  if (total == 0) fail(errc::all_zero_counts, "impurity of all-zero counts");
  if (criterion == SplitCriterion::gini) {
    double t = static_cast<double>(total);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_classes; ++i) {
      double p = static_cast<double>(counts[i]) / t;
      acc += p * p;
    }
    return 1.0 - acc;
  }
  double acc = table ? table[total] : xlog2(static_cast<double>(total));
  for (std::size_t i = 0; i < n_classes; ++i)
    acc -= table ? table[counts[i]] : xlog2(static_cast<double>(counts[i]));
  return acc / static_cast<double>(total);
}

inline double weighted_child_impurity(double left, double right, std::int64_t n_left,
                                      std::int64_t n_right) {
  return (static_cast<double>(n_left) * left + static_cast<double>(n_right) * right) /
         static_cast<double>(n_left + n_right);
}

//! Threshold between two consecutive distinct sorted values. Falls back to
//! the lower value if the midpoint rounds up to the higher one, so that
//! `x <= threshold` always reproduces the left/right partition of the scan.
inline double candidate_threshold(double lo, double hi) {
  double mid = lo + (hi - lo) * 0.5;
  return mid < hi ? mid : lo;
}

} // namespace detail

inline double impurity(std::span<const std::int64_t> class_counts, SplitCriterion criterion) {
  return detail::impurity_from_counts(class_counts.data(), class_counts.size(), criterion,
                                      nullptr);
}

namespace detail {

//! Comparable boundary quality. Minimizing the size-weighted mean child
//! impurity is equivalent to maximizing a/d (gini, exact integers, with
//! a = sl*nr + sr*nl over d = nl*nr for sl/sr the summed squared counts) or
//! to minimizing q = (xlog2(nl) - sum xlog2(cl)) + (xlog2(nr) - sum xlog2(cr))
//! (entropy). Division-free, and exact for gini, so ties are decided by scan
//! order alone: ascending (feature, threshold).
struct BoundaryScore {
  std::int64_t a = 0;
  std::int64_t d = 0;
  double q = 0.0;
};

inline bool score_improves(SplitCriterion criterion, const BoundaryScore& cand,
                           const BoundaryScore& best, bool have_best) {
  if (!have_best) return true;
  if (criterion == SplitCriterion::gini)
    return static_cast<__int128>(cand.a) * best.d > static_cast<__int128>(best.a) * cand.d;
  return cand.q < best.q;
}

struct ColumnScan {
  bool found = false;
  std::size_t left_size = 0;
  double threshold = 0.0;
  BoundaryScore score;
};

//! Scans one value-sorted column for its best threshold. Positions [0, m)
//! must be in ascending value order. `left_scratch` is a working histogram;
//! the winning boundary's left histogram lands in `winner_left`. Shared by
//! best_split and the tree grower so both choose identical splits.
template <SplitCriterion CRIT, class ValueAt, class ClassAt>
ColumnScan scan_sorted_column_impl(std::size_t m, std::span<const std::int64_t> total,
                                   const double* table, std::int64_t* left_scratch,
                                   std::int64_t* winner_left, ValueAt&& value_at,
                                   ClassAt&& class_at) {
  const std::size_t n_classes = total.size();
  std::fill(left_scratch, left_scratch + n_classes, 0);

  std::int64_t n = 0;
  std::int64_t sl = 0, sr = 0;
  double suml = 0.0, sumr = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    n += total[c];
    if constexpr (CRIT == SplitCriterion::gini)
      sr += total[c] * total[c];
    else
      sumr += table[total[c]];
  }

  ColumnScan result;
  double prev = value_at(0);
  for (std::size_t i = 1; i < m; ++i) {
    auto cls = static_cast<std::size_t>(class_at(i - 1));
    std::int64_t cl = left_scratch[cls];
    std::int64_t cr = total[cls] - cl;
    if constexpr (CRIT == SplitCriterion::gini) {
      sl += 2 * cl + 1;
      sr -= 2 * cr - 1;
    } else {
      suml += table[cl + 1] - table[cl];
      sumr += table[cr - 1] - table[cr];
    }
    left_scratch[cls] = cl + 1;
    double v = value_at(i);
    if (v != prev) {
      auto nl = static_cast<std::int64_t>(i);
      std::int64_t nr = n - nl;
      BoundaryScore score;
      bool improves;
      if constexpr (CRIT == SplitCriterion::gini) {
        score.a = sl * nr + sr * nl;
        score.d = nl * nr;
        improves = !result.found || static_cast<__int128>(score.a) * result.score.d >
                                        static_cast<__int128>(result.score.a) * score.d;
      } else {
        score.q = (table[nl] - suml) + (table[nr] - sumr);
        improves = !result.found || score.q < result.score.q;
      }
      if (improves) {
        result.found = true;
        result.left_size = i;
        result.threshold = candidate_threshold(prev, v);
        result.score = score;
        std::copy(left_scratch, left_scratch + n_classes, winner_left);
      }
      prev = v;
    }
  }
  return result;
}

template <class ValueAt, class ClassAt>
ColumnScan scan_sorted_column(std::size_t m, std::span<const std::int64_t> total,
                              SplitCriterion criterion, const double* table,
                              std::int64_t* left_scratch, std::int64_t* winner_left,
                              ValueAt&& value_at, ClassAt&& class_at) {
  if (criterion == SplitCriterion::gini)
    return scan_sorted_column_impl<SplitCriterion::gini>(
        m, total, table, left_scratch, winner_left, std::forward<ValueAt>(value_at),
        std::forward<ClassAt>(class_at));
  return scan_sorted_column_impl<SplitCriterion::entropy>(
      m, total, table, left_scratch, winner_left, std::forward<ValueAt>(value_at),
      std::forward<ClassAt>(class_at));
}

} // namespace detail

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double child_impurity = 0.0; // size-weighted mean child impurity
};

//! Exact CART split search over midpoint thresholds of the subset features.
//! Returns nullopt for single-class rows or when no threshold separates them.
//! Ties break to the lower (feature, threshold).
inline std::optional<SplitChoice> best_split(const LabeledDataset& data,
                                             std::span<const std::size_t> rows,
                                             std::span<const int> feature_subset,
                                             SplitCriterion criterion) {
  if (rows.empty()) fail(errc::empty_input, "best_split on empty rows");
  if (feature_subset.empty()) fail(errc::empty_input, "best_split with empty feature subset");

  std::vector<std::string> classes;
  for (std::size_t r : rows) classes.push_back(data.labels[r]);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) return std::nullopt;

  auto class_index = [&](const std::string& l) {
    return static_cast<std::size_t>(
        std::lower_bound(classes.begin(), classes.end(), l) - classes.begin());
  };

  std::vector<int> subset(feature_subset.begin(), feature_subset.end());
  std::sort(subset.begin(), subset.end());

  const std::size_t m = rows.size();
  const std::size_t n_classes = classes.size();
  std::vector<std::int64_t> total(n_classes, 0);
  for (std::size_t r : rows) ++total[class_index(data.labels[r])];

  std::vector<double> table(m + 1);
  for (std::size_t k = 0; k <= m; ++k) table[k] = detail::xlog2(static_cast<double>(k));

  std::vector<std::pair<double, std::int32_t>> column(m); // (value, class)
  std::vector<std::int64_t> left_scratch(n_classes), feature_left(n_classes),
      best_left(n_classes);

  int best_feature = -1;
  detail::ColumnScan best_scan;
  for (int f : subset) {
    for (std::size_t i = 0; i < m; ++i)
      column[i] = {data.at(rows[i], static_cast<std::size_t>(f)),
                   static_cast<std::int32_t>(class_index(data.labels[rows[i]]))};
    std::sort(column.begin(), column.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    detail::ColumnScan scan = detail::scan_sorted_column(
        m, total, criterion, table.data(), left_scratch.data(), feature_left.data(),
        [&](std::size_t i) { return column[i].first; },
        [&](std::size_t i) { return column[i].second; });
    if (scan.found &&
        detail::score_improves(criterion, scan.score, best_scan.score, best_scan.found)) {
      best_scan = scan;
      best_feature = f;
      best_left = feature_left;
    }
  }
  if (best_feature < 0) return std::nullopt;

  std::vector<std::int64_t> right(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) right[c] = total[c] - best_left[c];
  double w = detail::weighted_child_impurity(
      detail::impurity_from_counts(best_left.data(), n_classes, criterion, nullptr),
      detail::impurity_from_counts(right.data(), n_classes, criterion, nullptr),
      static_cast<std::int64_t>(best_scan.left_size),
      static_cast<std::int64_t>(m - best_scan.left_size));
  return SplitChoice{best_feature, best_scan.threshold, w};
}

//! Callback fired for every split node: depth, drawn feature subset
//! (ascending), and the chosen (feature, threshold).
struct SplitObservation {
  int depth = 0;
  std::vector<int> feature_subset;
  int chosen_feature = -1;
  double threshold = 0.0;
};
using SplitObserver = std::function<void(const SplitObservation&)>;

//! Reusable per-dataset structures shared by every tree trained on it:
//! per-feature value-sorted row orders, a feature-major value copy, label
//! indices, and an x*log2(x) table for entropy scans.
struct TrainingCache {
  std::vector<std::vector<std::int32_t>> sorted_rows; // per feature
  std::vector<std::vector<double>> values_t;          // feature-major
  std::vector<std::int32_t> label_index;              // per row
  std::vector<std::string> class_labels;              // sorted ascending
  std::vector<double> xlog2_table;                    // [0, n_rows]
};

inline TrainingCache build_training_cache(const LabeledDataset& data) {
  TrainingCache cache;
  cache.class_labels.assign(data.labels.begin(), data.labels.end());
  std::sort(cache.class_labels.begin(), cache.class_labels.end());
  cache.class_labels.erase(std::unique(cache.class_labels.begin(), cache.class_labels.end()),
                           cache.class_labels.end());

  cache.label_index.resize(data.n_rows);
  for (std::size_t r = 0; r < data.n_rows; ++r)
    cache.label_index[r] = static_cast<std::int32_t>(
        std::lower_bound(cache.class_labels.begin(), cache.class_labels.end(), data.labels[r]) -
        cache.class_labels.begin());

  cache.values_t.resize(data.n_features);
  cache.sorted_rows.resize(data.n_features);
  for (std::size_t f = 0; f < data.n_features; ++f) {
    auto& col = cache.values_t[f];
    col.resize(data.n_rows);
    for (std::size_t r = 0; r < data.n_rows; ++r) col[r] = data.at(r, f);
    auto& order = cache.sorted_rows[f];
    order.resize(data.n_rows);
    for (std::size_t r = 0; r < data.n_rows; ++r) order[r] = static_cast<std::int32_t>(r);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
      double va = col[static_cast<std::size_t>(a)], vb = col[static_cast<std::size_t>(b)];
      return va < vb || (va == vb && a < b);
    });
  }

  cache.xlog2_table.resize(data.n_rows + 1);
  for (std::size_t k = 0; k <= data.n_rows; ++k)
    cache.xlog2_table[k] = detail::xlog2(static_cast<double>(k));
  return cache;
}

namespace detail {

//! Grows trees over bootstrap multisets using presorted feature orders
//! partitioned down the recursion. Split decisions are exactly those of
//! best_split on the node's rows. One instance amortizes its working
//! buffers across every tree it grows.
class TreeGrower {
public:
  TreeGrower(const TrainingCache& cache, const RFHyperParams& hp,
             const SplitObserver* observer)
      : cache_(cache), hp_(hp), observer_(observer),
        n_features_(cache.values_t.size()),
        n_classes_(cache.class_labels.size()) {
    left_scratch_.resize(n_classes_);
    feature_left_.resize(n_classes_);
    best_left_.resize(n_classes_);
  }

  DecisionTree grow(std::span<const std::int32_t> bootstrap, RandomStream& rng) {
    m_ = bootstrap.size();
    rng_ = &rng;
    sample_row_.assign(bootstrap.begin(), bootstrap.end());
    sample_label_.resize(m_);
    for (std::size_t s = 0; s < m_; ++s)
      sample_label_[s] = cache_.label_index[static_cast<std::size_t>(sample_row_[s])];

    // Per-feature sample orders derived from the cache's row orders via a
    // counting pass over bootstrap multiplicities; no per-tree sorting.
    const std::size_t n_rows = cache_.label_index.size();
    row_start_.assign(n_rows + 1, 0);
    for (std::int32_t r : sample_row_) ++row_start_[static_cast<std::size_t>(r) + 1];
    for (std::size_t r = 0; r < n_rows; ++r) row_start_[r + 1] += row_start_[r];
    samples_by_row_.resize(m_);
    cursor_.assign(row_start_.begin(), row_start_.end() - 1);
    for (std::size_t s = 0; s < m_; ++s)
      samples_by_row_[static_cast<std::size_t>(
          cursor_[static_cast<std::size_t>(sample_row_[s])]++)] = static_cast<std::int32_t>(s);

    ord_ids_.resize(n_features_ * m_);
    ord_vals_.resize(n_features_ * m_);
    for (std::size_t f = 0; f < n_features_; ++f) {
      std::int32_t* ids = &ord_ids_[f * m_];
      double* vals = &ord_vals_[f * m_];
      const double* col = cache_.values_t[f].data();
      std::size_t pos = 0;
      for (std::int32_t r : cache_.sorted_rows[f]) {
        std::int32_t b = row_start_[static_cast<std::size_t>(r)];
        std::int32_t e = row_start_[static_cast<std::size_t>(r) + 1];
        for (std::int32_t i = b; i < e; ++i) {
          ids[pos] = samples_by_row_[static_cast<std::size_t>(i)];
          vals[pos] = col[static_cast<std::size_t>(r)];
          ++pos;
        }
      }
    }
    scratch_ids_.resize(m_);
    scratch_vals_.resize(m_);
    side_.resize(m_);
    table_ = cache_.xlog2_table.size() > m_ ? cache_.xlog2_table.data() : nullptr;
    if (!table_) {
      own_table_.resize(m_ + 1);
      for (std::size_t k = 0; k <= m_; ++k) own_table_[k] = xlog2(static_cast<double>(k));
      table_ = own_table_.data();
    }

    // children counts live in per-depth stack slots; the recursion depth is
    // bounded by both max_depth and the sample count
    std::size_t levels = std::min<std::size_t>(static_cast<std::size_t>(hp_.max_depth), m_) + 2;
    counts_left_stack_.resize(levels * n_classes_);
    counts_right_stack_.resize(levels * n_classes_);
    root_counts_.assign(n_classes_, 0);
    for (std::size_t s = 0; s < m_; ++s)
      ++root_counts_[static_cast<std::size_t>(sample_label_[s])];

    DecisionTree tree;
    tree.n_classes = n_classes_;
    tree.nodes.reserve(64);
    tree.counts.reserve(64 * n_classes_);
    tree_ = &tree;
    build_node(0, m_, 0, root_counts_.data());
    tree_ = nullptr;
    rng_ = nullptr;
    return tree;
  }

private:
  struct ScanResult {
    int feature = -1;
    double threshold = 0.0;
    std::size_t left_size = 0;
  };

  std::int32_t make_node(const std::int64_t* counts) {
    auto id = static_cast<std::int32_t>(tree_->nodes.size());
    tree_->nodes.emplace_back();
    tree_->counts.insert(tree_->counts.end(), counts, counts + n_classes_);
    return id;
  }

  std::int32_t leaf_label(const std::int64_t* counts) const {
    std::size_t best = 0;
    for (std::size_t c = 1; c < n_classes_; ++c)
      if (counts[c] > counts[best]) best = c; // ties keep the lower class index
    return static_cast<std::int32_t>(best);
  }

  std::int32_t make_leaf(const std::int64_t* counts) {
    std::int32_t id = make_node(counts);
    tree_->nodes[static_cast<std::size_t>(id)].label = leaf_label(counts);
    return id;
  }

  bool is_pure(const std::int64_t* counts) const {
    std::int64_t size = 0, top = 0;
    for (std::size_t c = 0; c < n_classes_; ++c) {
      size += counts[c];
      top = std::max(top, counts[c]);
    }
    return top == size;
  }

  std::int32_t build_node(std::size_t begin, std::size_t end, int depth,
                          const std::int64_t* counts) {
    if (is_pure(counts) || depth >= hp_.max_depth) return make_leaf(counts);

    int k = std::min<int>(hp_.max_features, static_cast<int>(n_features_));
    std::vector<int> subset = sample_without_replacement(static_cast<int>(n_features_), k, *rng_);
    std::sort(subset.begin(), subset.end());

    std::optional<ScanResult> best = scan(begin, end, subset, counts);
    if (!best) return make_leaf(counts);

    std::int32_t id = make_node(counts);
    if (observer_ && *observer_)
      (*observer_)({depth, subset, best->feature, best->threshold});

    std::int64_t* left_counts =
        &counts_left_stack_[static_cast<std::size_t>(depth + 1) * n_classes_];
    std::int64_t* right_counts =
        &counts_right_stack_[static_cast<std::size_t>(depth + 1) * n_classes_];
    for (std::size_t c = 0; c < n_classes_; ++c) {
      left_counts[c] = best_left_[c];
      right_counts[c] = counts[c] - best_left_[c];
    }

    tree_->nodes[static_cast<std::size_t>(id)].feature = best->feature;
    tree_->nodes[static_cast<std::size_t>(id)].threshold = best->threshold;

    // children that stop immediately need only their counts
    bool left_stops = is_pure(left_counts) || depth + 1 >= hp_.max_depth;
    bool right_stops = is_pure(right_counts) || depth + 1 >= hp_.max_depth;
    std::int32_t l, r;
    if (left_stops && right_stops) {
      l = make_leaf(left_counts);
      r = make_leaf(right_counts);
    } else {
      partition(begin, end, *best);
      std::size_t mid = begin + best->left_size;
      l = build_node(begin, mid, depth + 1, left_counts);
      r = build_node(mid, end, depth + 1, right_counts);
    }
    tree_->nodes[static_cast<std::size_t>(id)].left = l;
    tree_->nodes[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  std::optional<ScanResult> scan(std::size_t begin, std::size_t end,
                                 const std::vector<int>& subset, const std::int64_t* counts) {
    const std::size_t m = end - begin;
    std::span<const std::int64_t> total(counts, n_classes_);
    std::optional<ScanResult> best;
    BoundaryScore best_score;
    for (int f : subset) {
      const std::int32_t* ids = &ord_ids_[static_cast<std::size_t>(f) * m_ + begin];
      const double* vals = &ord_vals_[static_cast<std::size_t>(f) * m_ + begin];
      ColumnScan scan = scan_sorted_column(
          m, total, hp_.criterion, table_, left_scratch_.data(), feature_left_.data(),
          [&](std::size_t i) { return vals[i]; },
          [&](std::size_t i) { return sample_label_[static_cast<std::size_t>(ids[i])]; });
      if (scan.found && score_improves(hp_.criterion, scan.score, best_score, best.has_value())) {
        best = ScanResult{f, scan.threshold, scan.left_size};
        best_score = scan.score;
        std::copy(feature_left_.begin(), feature_left_.end(), best_left_.begin());
      }
    }
    return best;
  }

  void partition(std::size_t begin, std::size_t end, const ScanResult& split) {
    const std::int32_t* chosen = &ord_ids_[static_cast<std::size_t>(split.feature) * m_ + begin];
    const std::size_t m = end - begin;
    for (std::size_t i = 0; i < m; ++i)
      side_[static_cast<std::size_t>(chosen[i])] = i < split.left_size ? 1 : 0;
    for (std::size_t f = 0; f < n_features_; ++f) {
      std::int32_t* ids = &ord_ids_[f * m_ + begin];
      double* vals = &ord_vals_[f * m_ + begin];
      std::copy(ids, ids + m, scratch_ids_.begin());
      std::copy(vals, vals + m, scratch_vals_.begin());
      std::size_t l = 0, r = split.left_size;
      for (std::size_t i = 0; i < m; ++i) {
        std::int32_t s = scratch_ids_[i];
        std::size_t dst = side_[static_cast<std::size_t>(s)] ? l++ : r++;
        ids[dst] = s;
        vals[dst] = scratch_vals_[i];
      }
    }
  }

  const TrainingCache& cache_;
  const RFHyperParams& hp_;
  const SplitObserver* observer_;
  std::size_t n_features_;
  std::size_t n_classes_;
  std::size_t m_ = 0;
  RandomStream* rng_ = nullptr;
  std::vector<std::int32_t> sample_row_;
  std::vector<std::int32_t> sample_label_;
  std::vector<std::int32_t> row_start_;
  std::vector<std::int32_t> cursor_;
  std::vector<std::int32_t> samples_by_row_;
  std::vector<std::int32_t> ord_ids_;
  std::vector<double> ord_vals_;
  std::vector<std::int32_t> scratch_ids_;
  std::vector<double> scratch_vals_;
  std::vector<std::uint8_t> side_;
  std::vector<std::int64_t> left_scratch_;
  std::vector<std::int64_t> feature_left_;
  std::vector<std::int64_t> best_left_;
  std::vector<std::int64_t> counts_left_stack_;
  std::vector<std::int64_t> counts_right_stack_;
  std::vector<std::int64_t> root_counts_;
  std::vector<double> own_table_;
  const double* table_ = nullptr;
  DecisionTree* tree_ = nullptr;
};

} // namespace detail

//! Grows a single tree on the given bootstrap multiset. One feature subset
//! is drawn per node from `rng`; recursion is preorder, left child first.
inline DecisionTree train_tree(const LabeledDataset& data,
                               const std::vector<std::int32_t>& bootstrap_indices,
                               const RFHyperParams& hp, RandomStream& rng,
                               const TrainingCache* cache = nullptr,
                               const SplitObserver* observer = nullptr) {
  hp.validate();
  if (bootstrap_indices.empty()) fail(errc::empty_input, "empty bootstrap sample");
  TrainingCache local;
  if (!cache) {
    local = build_training_cache(data);
    cache = &local;
  }
  detail::TreeGrower grower(*cache, hp, observer);
  return grower.grow(bootstrap_indices, rng);
}

struct ForestTrainOptions {
  bool bootstrap = true; // test hook: identity sample when false
  const TrainingCache* cache = nullptr;
  const SplitObserver* observer = nullptr;
};

//! Trains n_estimators trees on per-tree substreams of `seed`. Pure function
//! of (data, hp, seed, options); trees are grown concurrently when the
//! thread budget allows (serial when an observer is attached).
inline ForestModel train_forest(const LabeledDataset& data, const RFHyperParams& hp,
                                std::uint64_t seed, const ForestTrainOptions& options = {}) {
  hp.validate();
  if (data.n_rows == 0) fail(errc::empty_dataset, "cannot train a forest on an empty dataset");

  TrainingCache local;
  const TrainingCache* cache = options.cache;
  if (!cache) {
    local = build_training_cache(data);
    cache = &local;
  }

  ForestModel model;
  model.hyperparams = hp;
  model.class_labels = cache->class_labels;
  model.feature_count = data.n_features;
  auto n_trees = static_cast<std::size_t>(hp.n_estimators);
  model.trees.resize(n_trees);

  RandomStream root(seed);
  std::size_t workers = std::min<std::size_t>(thread_budget(), n_trees);
  if (options.observer) workers = 1; // observer callbacks are not synchronized
  parallel_for(workers, [&](std::size_t w) {
    detail::TreeGrower grower(*cache, hp, options.observer);
    std::vector<std::int32_t> bootstrap(data.n_rows);
    for (std::size_t t = w; t < n_trees; t += workers) {
      RandomStream rng = root.substream("tree", t);
      if (options.bootstrap) {
        for (std::size_t i = 0; i < data.n_rows; ++i)
          bootstrap[i] = static_cast<std::int32_t>(rng.uniform_index(data.n_rows));
      } else {
        for (std::size_t i = 0; i < data.n_rows; ++i)
          bootstrap[i] = static_cast<std::int32_t>(i);
      }
      model.trees[t] = grower.grow(bootstrap, rng);
    }
  });
  return model;
}

//! Majority vote across trees; ties go to the lexicographically smallest
//! class label (class_labels is sorted, so the lowest index).
inline std::int32_t predict_class_index(const ForestModel& model, std::span<const double> row) {
  if (row.size() != model.feature_count)
    fail(errc::dimension_mismatch, "row has " + std::to_string(row.size()) + " features, model expects " +
                                       std::to_string(model.feature_count));
  std::vector<std::int64_t> votes(model.class_labels.size(), 0);
  for (const auto& tree : model.trees) ++votes[static_cast<std::size_t>(tree.predict_index(row))];
  std::size_t best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c)
    if (votes[c] > votes[best]) best = c;
  return static_cast<std::int32_t>(best);
}

inline std::string predict(const ForestModel& model, std::span<const double> row) {
  return model.class_labels[static_cast<std::size_t>(predict_class_index(model, row))];
}

inline std::vector<std::string> predict_batch(const ForestModel& model,
                                              const LabeledDataset& data) {
  if (data.n_features != model.feature_count)
    fail(errc::dimension_mismatch, "dataset/model feature count mismatch");
  std::vector<std::string> out(data.n_rows);
  for (std::size_t r = 0; r < data.n_rows; ++r)
    out[r] = predict(model, std::span<const double>(&data.features[r * data.n_features],
                                                    data.n_features));
  return out;
}

} // namespace tune
