/*
 * Copyright 2026 The vtf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vtf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "vtf/errors.hpp"
#include "vtf/hash.hpp"

namespace vtf {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                         ", column " + std::to_string(col),
                     row, col);
  }
  return value;
}

}  // namespace

std::string_view to_string(TaskKind t) {
  return t == TaskKind::kRegression ? "regression" : "binary_classification";
}

TaskKind task_kind_from_string(std::string_view s) {
  if (s == "regression") return TaskKind::kRegression;
  if (s == "binary_classification" || s == "classification") {
    return TaskKind::kBinaryClassification;
  }
  throw ArgumentError("unknown task '" + std::string(s) + "'");
}

void Dataset::validate() const {
  if (features.rows() < 1) throw ArgumentError("dataset has no samples");
  if (features.cols() < 1) throw ArgumentError("dataset has no features");
  if (target.size() != features.rows()) {
    throw ShapeError("dataset: " + std::to_string(features.rows()) + " rows but " +
                     std::to_string(target.size()) + " targets");
  }
  if (feature_names.size() != num_features()) {
    throw ShapeError("dataset: " + std::to_string(feature_names.size()) + " names for " +
                     std::to_string(num_features()) + " features");
  }
  std::set<std::string> unique(feature_names.begin(), feature_names.end());
  if (unique.size() != feature_names.size()) {
    throw ArgumentError("dataset: feature names are not unique");
  }
  if (task == TaskKind::kBinaryClassification) {
    for (Eigen::Index i = 0; i < target.size(); ++i) {
      if (target(i) != 0.0 && target(i) != 1.0) {
        throw ArgumentError("dataset: classification target at row " + std::to_string(i) +
                            " is not 0 or 1");
      }
    }
  }
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");

  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_fields(t);
    if (schema.has_header && header.empty()) {
      header = std::move(fields);
      width = header.size();
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw ParseError("row " + std::to_string(line_no) + " has " +
                           std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(width),
                       line_no, 0);
    }
    std::vector<double> values(width);
    for (std::size_t c = 0; c < width; ++c) values[c] = parse_cell(fields[c], line_no, c + 1);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ArgumentError("dataset '" + path.string() + "' has no data rows");
  if (width < 2) throw SchemaError("dataset needs at least one feature and a target column");

  std::size_t target_col = width - 1;
  if (!schema.target_column.empty()) {
    if (schema.has_header) {
      auto it = std::find(header.begin(), header.end(), schema.target_column);
      if (it == header.end()) {
        throw SchemaError("target column '" + schema.target_column + "' not in header of '" +
                          path.string() + "'");
      }
      target_col = static_cast<std::size_t>(it - header.begin());
    } else {
      std::size_t idx = 0;
      auto [ptr, ec] = std::from_chars(schema.target_column.data(),
                                       schema.target_column.data() + schema.target_column.size(),
                                       idx);
      if (ec != std::errc() || idx >= width) {
        throw SchemaError("target column index '" + schema.target_column + "' is invalid");
      }
      target_col = idx;
    }
  }

  Dataset data;
  data.task = schema.task;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(width - 1);
  data.features.resize(n, d);
  data.target.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    Eigen::Index out_c = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == target_col) {
        data.target(r) = rows[static_cast<std::size_t>(r)][c];
      } else {
        data.features(r, out_c++) = rows[static_cast<std::size_t>(r)][c];
      }
    }
  }
  for (std::size_t c = 0; c < width; ++c) {
    const std::string name = schema.has_header ? header[c] : "x" + std::to_string(c + 1);
    if (c == target_col) {
      data.target_name = schema.has_header ? name : "target";
    } else {
      data.feature_names.push_back(name);
    }
  }
  data.validate();
  return data;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  for (const auto& name : data.feature_names) out << name << ',';
  out << data.target_name << '\n';
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.features.cols(); ++c) out << data.features(r, c) << ',';
    out << data.target(r) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Dataset select_rows(const Dataset& data, const std::vector<std::size_t>& rows) {
  Dataset out = data;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.features.cols());
  out.target.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.features.row(r) = data.features.row(static_cast<Eigen::Index>(rows[i]));
    out.target(r) = data.target(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

Dataset select_columns(const Dataset& data, const std::vector<std::size_t>& columns) {
  Dataset out;
  out.task = data.task;
  out.target = data.target;
  out.target_name = data.target_name;
  out.features.resize(data.features.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] >= data.num_features()) {
      throw ArgumentError("select_columns: column " + std::to_string(columns[i]) +
                          " out of range");
    }
    out.features.col(static_cast<Eigen::Index>(i)) =
        data.features.col(static_cast<Eigen::Index>(columns[i]));
    out.feature_names.push_back(data.feature_names[columns[i]]);
  }
  if (data.standardization) {
    Standardization s;
    s.mean.resize(static_cast<Eigen::Index>(columns.size()));
    s.std.resize(static_cast<Eigen::Index>(columns.size()));
    for (std::size_t i = 0; i < columns.size(); ++i) {
      s.mean(static_cast<Eigen::Index>(i)) = data.standardization->mean(static_cast<Eigen::Index>(columns[i]));
      s.std(static_cast<Eigen::Index>(i)) = data.standardization->std(static_cast<Eigen::Index>(columns[i]));
      s.constant.push_back(data.standardization->constant[columns[i]]);
    }
    out.standardization = std::move(s);
  }
  if (data.ground_truth) {
    Vector gt(static_cast<Eigen::Index>(columns.size()));
    for (std::size_t i = 0; i < columns.size(); ++i) {
      gt(static_cast<Eigen::Index>(i)) = (*data.ground_truth)(static_cast<Eigen::Index>(columns[i]));
    }
    out.ground_truth = std::move(gt);
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ArgumentError("split: ratio must lie in (0, 1)");
  const std::size_t n = data.num_samples();
  if (n < 2) throw ArgumentError("split: need at least 2 samples, got " + std::to_string(n));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  std::vector<std::size_t> train_rows(order.begin(), order.begin() + static_cast<long>(n_train));
  std::vector<std::size_t> test_rows(order.begin() + static_cast<long>(n_train), order.end());
  return {select_rows(data, train_rows), select_rows(data, test_rows)};
}

Standardization fit_standardization(const Matrix& x) {
  if (x.rows() == 0) throw ArgumentError("standardize: empty training set");
  Standardization s;
  s.mean = x.colwise().mean().transpose();
  s.std.resize(x.cols());
  s.constant.assign(static_cast<std::size_t>(x.cols()), false);
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double var = (x.col(c).array() - s.mean(c)).square().mean();
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
      s.std(c) = sd;
    } else {
      s.std(c) = 1.0;
      s.constant[static_cast<std::size_t>(c)] = true;
    }
  }
  return s;
}

Matrix apply_standardization(const Standardization& s, const Matrix& x) {
  if (x.cols() != s.mean.size()) {
    throw ShapeError("standardize: " + std::to_string(x.cols()) + " columns but " +
                     std::to_string(s.mean.size()) + " fitted");
  }
  Matrix out = x;
  out.rowwise() -= s.mean.transpose();
  out.array().rowwise() /= s.std.transpose().array();
  return out;
}

std::pair<Dataset, Dataset> standardize(const Dataset& train, const Dataset& test) {
  Standardization s = fit_standardization(train.features);
  Dataset tr = train;
  Dataset te = test;
  tr.features = apply_standardization(s, train.features);
  te.features = apply_standardization(s, test.features);
  tr.standardization = s;
  te.standardization = std::move(s);
  return {std::move(tr), std::move(te)};
}

Dataset synth_linear(std::size_t n, const Vector& coefficients, double noise_std,
                     std::uint64_t seed) {
  if (n < 10) throw ArgumentError("synth_linear: n must be >= 10");
  if (coefficients.size() < 1) throw ArgumentError("synth_linear: need >= 1 coefficient");
  if (!(noise_std >= 0.0)) throw ArgumentError("synth_linear: noise_std must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data;
  const auto d = coefficients.size();
  data.features.resize(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < d; ++c) data.features(r, c) = normal(rng);
  }
  data.target = data.features * coefficients;
  if (noise_std > 0.0) {
    for (Eigen::Index r = 0; r < data.target.size(); ++r) data.target(r) += noise_std * normal(rng);
  }
  for (Eigen::Index c = 0; c < d; ++c) data.feature_names.push_back("x" + std::to_string(c + 1));
  data.ground_truth = coefficients;
  return data;
}

std::string dataset_hash(const Dataset& data) {
  Fnv1a h;
  h.update(to_string(data.task));
  for (const auto& name : data.feature_names) {
    h.update(name);
    h.update(std::string_view("\0", 1));
  }
  h.update(data.target_name);
  h.update_value(static_cast<std::uint64_t>(data.features.rows()));
  h.update_value(static_cast<std::uint64_t>(data.features.cols()));
  for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.features.cols(); ++c) h.update_value(data.features(r, c));
    h.update_value(data.target(r));
  }
  return h.hex();
}

}  // namespace vtf
