/*
 * include/fsg/model_io.hpp
 *
 * Copyright 2026 The fsg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Model files are JSON documents. Doubles are written in shortest
// round-trip form, so save followed by load reproduces every value bit for
// bit.

#ifndef FSG_MODEL_IO_HPP
#define FSG_MODEL_IO_HPP

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fsg/fsg.hpp"

namespace fsg {

inline constexpr const char* kModelFormat = "fsg-model";
inline constexpr int kModelVersion = 1;

inline nlohmann::ordered_json model_to_json(const FsgModel& m) {
  nlohmann::ordered_json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["num_classes"] = m.num_classes();
  j["num_spaces"] = m.num_spaces();
  j["space_dims"] = m.space_dims();
  j["fuzzifier"] = m.fuzzifier();
  j["base_k"] = m.base_k();
  j["meta_k"] = m.meta_k();
  j["class_names"] = m.class_names();
  j["ids"] = m.ids();
  j["labels"] = m.labels();
  auto spaces = nlohmann::ordered_json::array();
  for (const auto& s : m.spaces()) spaces.push_back(s.data());
  j["spaces"] = std::move(spaces);
  j["fused"] = m.fused().data();
  return j;
}

inline FsgModel model_from_json(const nlohmann::ordered_json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw Error(ErrorKind::DataFormat, "not an fsg model document");
    }
    if (j.at("version").get<int>() != kModelVersion) {
      throw Error(ErrorKind::DataFormat,
                  "unsupported model version " + std::to_string(j.at("version").get<int>()));
    }
    const auto c = j.at("num_classes").get<std::size_t>();
    const auto dims = j.at("space_dims").get<std::vector<std::size_t>>();
    if (j.at("num_spaces").get<std::size_t>() != dims.size()) {
      throw Error(ErrorKind::DataFormat, "num_spaces disagrees with space_dims");
    }
    auto labels = j.at("labels").get<std::vector<ClassIndex>>();
    const std::size_t n = labels.size();
    std::vector<FeatureMatrix> spaces;
    const auto& js = j.at("spaces");
    if (js.size() != dims.size()) throw Error(ErrorKind::DataFormat, "space count mismatch");
    for (std::size_t s = 0; s < dims.size(); ++s) {
      spaces.emplace_back(n, dims[s], js[s].get<std::vector<double>>());
    }
    FeatureMatrix fused(n, c * dims.size(), j.at("fused").get<std::vector<double>>());
    return FsgModel(c, j.at("fuzzifier").get<double>(),
                    j.at("base_k").get<std::vector<std::size_t>>(), j.at("meta_k").get<std::size_t>(),
                    j.at("class_names").get<std::vector<std::string>>(),
                    j.at("ids").get<std::vector<std::string>>(), std::move(labels),
                    std::move(spaces), std::move(fused));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::DataFormat, std::string("malformed model document: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DataFormat) throw;
    throw Error(ErrorKind::DataFormat, std::string("inconsistent model document: ") + e.what());
  }
}

inline void save_model(const FsgModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write model file " + path.string());
  out << model_to_json(m).dump() << '\n';
  if (!out) throw Error(ErrorKind::Io, "failed writing model file " + path.string());
}

inline FsgModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open model file " + path.string());
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::DataFormat, path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace fsg

#endif  // FSG_MODEL_IO_HPP
