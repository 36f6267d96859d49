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

#include "vtf/model_io.hpp"

#include <fstream>
#include <string>

#include "vtf/errors.hpp"

namespace vtf {

nlohmann::json model_to_json(const LayeredModel& model) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : model.layers()) {
    nlohmann::json weights = nlohmann::json::array();
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) weights.push_back(l.weights(r, c));
    }
    nlohmann::json entry = {
        {"in", l.in_dim()},
        {"out", l.out_dim()},
        {"activation", std::string(to_string(l.activation))},
        {"weights", std::move(weights)},
        {"trainable", l.trainable},
    };
    if (l.biases) {
      entry["biases"] = std::vector<double>(l.biases->begin(), l.biases->end());
    } else {
      entry["biases"] = nullptr;
    }
    layers.push_back(std::move(entry));
  }
  return {
      {"layers", std::move(layers)},
      {"loss_kind", std::string(to_string(model.loss_kind()))},
      {"input_dim", model.input_dim()},
  };
}

LayeredModel model_from_json(const nlohmann::json& doc) {
  try {
    LayeredModel model(doc.at("input_dim").get<std::size_t>(),
                       loss_kind_from_string(doc.at("loss_kind").get<std::string>()));
    for (const auto& entry : doc.at("layers")) {
      const auto in = entry.at("in").get<std::size_t>();
      const auto out = entry.at("out").get<std::size_t>();
      const auto& w = entry.at("weights");
      if (w.size() != in * out) {
        throw SchemaError("model json: layer weights have " + std::to_string(w.size()) +
                          " values, expected " + std::to_string(in * out));
      }
      DenseLayer layer;
      layer.weights.resize(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out));
      for (std::size_t r = 0; r < in; ++r) {
        for (std::size_t c = 0; c < out; ++c) {
          layer.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              w.at(r * out + c).get<double>();
        }
      }
      if (entry.contains("biases") && !entry.at("biases").is_null()) {
        const auto b = entry.at("biases").get<std::vector<double>>();
        layer.biases = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
      }
      layer.activation = activation_from_string(entry.at("activation").get<std::string>());
      layer.trainable = entry.value("trainable", true);
      model.add_layer(std::move(layer));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("model json: ") + e.what());
  } catch (const ShapeError& e) {
    throw SchemaError(std::string("model json: ") + e.what());
  } catch (const ArgumentError& e) {
    throw SchemaError(std::string("model json: ") + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace vtf
