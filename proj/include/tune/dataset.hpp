#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tune/error.hpp"
#include "tune/rng.hpp"

namespace tune {

//! Tabular classification data: row-major feature matrix plus string labels.
struct LabeledDataset {
  std::vector<double> features; // n_rows * n_features, row-major
  std::vector<std::string> labels;
  std::vector<std::string> feature_names;
  std::size_t n_rows = 0;
  std::size_t n_features = 0;

  double at(std::size_t row, std::size_t col) const {
    return features[row * n_features + col];
  }

  std::map<std::string, std::size_t> class_counts() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& l : labels) ++counts[l];
    return counts;
  }

  //! Gather a row subset (in the given index order).
  LabeledDataset take_rows(const std::vector<std::size_t>& rows) const {
    LabeledDataset out;
    out.feature_names = feature_names;
    out.n_features = n_features;
    out.n_rows = rows.size();
    out.features.reserve(rows.size() * n_features);
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) {
      out.features.insert(out.features.end(), features.begin() + static_cast<std::ptrdiff_t>(r * n_features),
                          features.begin() + static_cast<std::ptrdiff_t>((r + 1) * n_features));
      out.labels.push_back(labels[r]);
    }
    return out;
  }
};

struct DatasetSchema {
  std::string label_column;
  std::string positive_label;
  std::string negative_label;
  std::vector<std::string> feature_columns;
  std::optional<std::size_t> rows_expected;
};

namespace detail {

//! Splits one CSV record. Handles double-quoted fields with embedded commas
//! and doubled quotes; no embedded newlines.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e && b != e && std::isfinite(out);
}

} // namespace detail

//! Loads a headered CSV against the schema. Fail-fast: any unparseable
//! feature or unknown label aborts the load with its row number.
inline LabeledDataset load_csv(const std::string& path, const DatasetSchema& schema) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) fail(errc::empty_dataset, "'" + path + "' is empty");
  auto header = detail::split_csv_line(line);

  auto column_of = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      fail(errc::missing_column, "column '" + name + "' not found in '" + path + "'");
    return static_cast<std::size_t>(it - header.begin());
  };

  std::size_t label_col = column_of(schema.label_column);
  std::vector<std::size_t> feature_cols;
  feature_cols.reserve(schema.feature_columns.size());
  for (const auto& name : schema.feature_columns) feature_cols.push_back(column_of(name));

  LabeledDataset data;
  data.feature_names = schema.feature_columns;
  data.n_features = feature_cols.size();

  std::size_t row_number = 1; // header is row 1
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      fail(errc::parse_error, "row " + std::to_string(row_number) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    for (std::size_t c : feature_cols) {
      double v = 0.0;
      if (!detail::parse_double(fields[c], v))
        fail(errc::parse_error, "row " + std::to_string(row_number) + ", column '" +
                                    header[c] + "': cannot parse '" + fields[c] + "'");
      data.features.push_back(v);
    }
    const std::string& label = fields[label_col];
    if (label != schema.positive_label && label != schema.negative_label)
      fail(errc::unknown_label,
           "row " + std::to_string(row_number) + ": unknown label '" + label + "'");
    data.labels.push_back(label);
    ++data.n_rows;
  }
  if (data.n_rows == 0) fail(errc::empty_dataset, "'" + path + "' has a header but no rows");
  if (schema.rows_expected && *schema.rows_expected != data.n_rows)
    fail(errc::parse_error, "'" + path + "': expected " + std::to_string(*schema.rows_expected) +
                                " rows, got " + std::to_string(data.n_rows));
  return data;
}

namespace detail {

//! Largest-remainder apportionment of n across class sizes; per-class share
//! differs from exact proportionality by less than one row.
inline std::vector<std::size_t> apportion(const std::vector<std::size_t>& class_sizes,
                                          std::size_t n, std::size_t total) {
  std::vector<std::size_t> out(class_sizes.size());
  std::vector<std::pair<double, std::size_t>> remainders; // (-frac, class) for stable sort
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < class_sizes.size(); ++c) {
    double exact = static_cast<double>(n) * static_cast<double>(class_sizes[c]) /
                   static_cast<double>(total);
    out[c] = static_cast<std::size_t>(std::floor(exact));
    if (out[c] > class_sizes[c]) out[c] = class_sizes[c];
    assigned += out[c];
    remainders.emplace_back(-(exact - std::floor(exact)), c);
  }
  std::stable_sort(remainders.begin(), remainders.end());
  for (auto [negfrac, c] : remainders) {
    if (assigned >= n) break;
    if (out[c] < class_sizes[c]) {
      ++out[c];
      ++assigned;
    }
  }
  // if some classes were capped at their size, distribute leftovers in order
  for (std::size_t c = 0; assigned < n && c < out.size(); ++c) {
    while (assigned < n && out[c] < class_sizes[c]) {
      ++out[c];
      ++assigned;
    }
  }
  return out;
}

} // namespace detail

//! Per-class proportional sampling without replacement; the total is forced
//! to n. Output preserves the original row order.
inline LabeledDataset subsample_stratified(const LabeledDataset& data, std::size_t n,
                                           std::uint64_t seed) {
  if (n > data.n_rows)
    fail(errc::n_too_large, "subsample of " + std::to_string(n) + " from " +
                                std::to_string(data.n_rows) + " rows");
  if (n == data.n_rows) return data;

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t r = 0; r < data.n_rows; ++r) by_class[data.labels[r]].push_back(r);

  std::vector<std::size_t> class_sizes;
  class_sizes.reserve(by_class.size());
  for (const auto& [label, rows] : by_class) class_sizes.push_back(rows.size());
  auto shares = detail::apportion(class_sizes, n, data.n_rows);

  RandomStream root(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(n);
  std::size_t class_index = 0;
  for (auto& [label, rows] : by_class) {
    RandomStream rng = root.substream("class", class_index);
    shuffle(rows, rng);
    for (std::size_t i = 0; i < shares[class_index]; ++i) chosen.push_back(rows[i]);
    ++class_index;
  }
  std::sort(chosen.begin(), chosen.end());
  return data.take_rows(chosen);
}

} // namespace tune
