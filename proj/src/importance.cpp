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

#include "vtf/importance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "vtf/errors.hpp"

namespace vtf {
namespace {

nlohmann::json score_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double score_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw SchemaError("profile json: bad score '" + s + "'");
  }
  return j.get<double>();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n\"");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kVtf:
      return "vtf";
    case Method::kRvtw:
      return "rvtw";
    case Method::kCf:
      return "cf";
    case Method::kPermutation:
      return "permutation";
    case Method::kConnectionWeights:
      return "cw";
    case Method::kFisherScore:
      return "fisher";
    case Method::kExternal:
      return "external";
  }
  return "external";
}

Method method_from_string(std::string_view s) {
  if (s == "vtf") return Method::kVtf;
  if (s == "rvtw") return Method::kRvtw;
  if (s == "cf") return Method::kCf;
  if (s == "permutation") return Method::kPermutation;
  if (s == "cw" || s == "connection_weights") return Method::kConnectionWeights;
  if (s == "fisher") return Method::kFisherScore;
  if (s == "external") return Method::kExternal;
  throw ArgumentError("unknown method '" + std::string(s) + "'");
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::kHigherIsMoreImportant:
      return "higher_is_more_important";
    case Direction::kHigherIsLessImportant:
      return "higher_is_less_important";
    case Direction::kMagnitudeIsMoreImportant:
      return "magnitude_is_more_important";
  }
  return "higher_is_more_important";
}

Direction direction_from_string(std::string_view s) {
  if (s == "higher_is_more_important") return Direction::kHigherIsMoreImportant;
  if (s == "higher_is_less_important") return Direction::kHigherIsLessImportant;
  if (s == "magnitude_is_more_important") return Direction::kMagnitudeIsMoreImportant;
  throw ArgumentError("unknown direction '" + std::string(s) + "'");
}

std::vector<std::size_t> rank(const Vector& scores, Direction direction) {
  std::vector<std::size_t> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t i) {
    const double s = scores(static_cast<Eigen::Index>(i));
    switch (direction) {
      case Direction::kHigherIsMoreImportant:
        return s;
      case Direction::kHigherIsLessImportant:
        return -s;
      case Direction::kMagnitudeIsMoreImportant:
        return std::abs(s);
    }
    return s;
  };
  // NaN scores sink to the end.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ka = key(a);
    const double kb = key(b);
    if (std::isnan(ka) || std::isnan(kb)) return !std::isnan(ka) && std::isnan(kb);
    return ka > kb;
  });
  return order;
}

ImportanceProfile make_profile(Method method, Direction direction, Vector scores,
                               std::vector<std::string> feature_names) {
  if (static_cast<std::size_t>(scores.size()) != feature_names.size()) {
    throw ShapeError("profile: " + std::to_string(scores.size()) + " scores for " +
                     std::to_string(feature_names.size()) + " features");
  }
  ImportanceProfile p;
  p.method = method;
  p.name = std::string(to_string(method));
  p.direction = direction;
  p.ranking = rank(scores, direction);
  p.scores = std::move(scores);
  p.feature_names = std::move(feature_names);
  return p;
}

std::vector<RankedFeature> ranked_features(const ImportanceProfile& profile) {
  std::vector<RankedFeature> out;
  out.reserve(profile.ranking.size());
  for (std::size_t pos = 0; pos < profile.ranking.size(); ++pos) {
    const std::size_t j = profile.ranking[pos];
    out.push_back({j, profile.feature_names.at(j), profile.scores(static_cast<Eigen::Index>(j)),
                   pos + 1});
  }
  return out;
}

nlohmann::json profile_to_json(const ImportanceProfile& p) {
  nlohmann::json scores = nlohmann::json::array();
  for (Eigen::Index j = 0; j < p.scores.size(); ++j) scores.push_back(score_to_json(p.scores(j)));
  return {
      {"method", std::string(to_string(p.method))},
      {"name", p.name},
      {"direction", std::string(to_string(p.direction))},
      {"feature_names", p.feature_names},
      {"scores", std::move(scores)},
      {"ranking", p.ranking},
      {"diagnostics", p.diagnostics},
  };
}

ImportanceProfile profile_from_json(const nlohmann::json& doc) {
  try {
    ImportanceProfile p;
    p.method = method_from_string(doc.at("method").get<std::string>());
    p.name = doc.value("name", std::string(to_string(p.method)));
    p.direction = direction_from_string(doc.at("direction").get<std::string>());
    p.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    const auto& scores = doc.at("scores");
    p.scores.resize(static_cast<Eigen::Index>(scores.size()));
    for (std::size_t j = 0; j < scores.size(); ++j) {
      p.scores(static_cast<Eigen::Index>(j)) = score_from_json(scores.at(j));
    }
    p.ranking = doc.at("ranking").get<std::vector<std::size_t>>();
    if (doc.contains("diagnostics")) p.diagnostics = doc.at("diagnostics");
    if (p.ranking.size() != p.feature_names.size() ||
        static_cast<std::size_t>(p.scores.size()) != p.feature_names.size()) {
      throw SchemaError("profile json: inconsistent lengths");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("profile json: ") + e.what());
  }
}

std::string profile_to_csv(const ImportanceProfile& p) {
  std::ostringstream out;
  out.precision(17);
  out << "name,score,rank\n";
  for (const auto& f : ranked_features(p)) {
    out << f.name << ',' << f.score << ',' << f.rank << '\n';
  }
  return out.str();
}

ImportanceProfile load_external_ranking(const std::filesystem::path& path,
                                        const std::vector<std::string>& feature_names) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ranking '" + path.string() + "'");
  std::map<std::string, double> ranks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) {
      throw ParseError("ranking line " + std::to_string(line_no) + " has no comma", line_no);
    }
    const std::string name = trim(t.substr(0, comma));
    const std::string value = trim(t.substr(comma + 1));
    if (line_no == 1 && name == "name") continue;
    double r = 0.0;
    try {
      std::size_t used = 0;
      r = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ParseError("ranking line " + std::to_string(line_no) + ": bad rank '" + value + "'",
                       line_no, 2);
    }
    if (!ranks.emplace(name, r).second) {
      throw SchemaError("ranking lists feature '" + name + "' twice");
    }
  }
  Vector scores(static_cast<Eigen::Index>(feature_names.size()));
  for (std::size_t j = 0; j < feature_names.size(); ++j) {
    auto it = ranks.find(feature_names[j]);
    if (it == ranks.end()) {
      throw SchemaError("ranking '" + path.string() + "' is missing feature '" +
                        feature_names[j] + "'");
    }
    scores(static_cast<Eigen::Index>(j)) = it->second;
  }
  if (ranks.size() != feature_names.size()) {
    throw SchemaError("ranking '" + path.string() + "' names features not in the dataset");
  }
  ImportanceProfile p =
      make_profile(Method::kExternal, Direction::kHigherIsLessImportant, scores, feature_names);
  p.name = path.stem().string();
  return p;
}

}  // namespace vtf
