/* Copyright 2026 The TinyLIC Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "tinylic/model_config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tinylic/errors.hpp"
#include "tinylic/hashing.hpp"

namespace tinylic {
namespace {

using nlohmann::json;

void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError("model config: " + what);
}

template <std::size_t N>
void read_array(const json& j, const char* key,
                std::array<std::size_t, N>& dst) {
  if (!j.contains(key)) return;
  const auto& arr = j.at(key);
  require(arr.is_array() && arr.size() == N,
          std::string(key) + " must be an array of " + std::to_string(N) +
              " counts");
  for (std::size_t i = 0; i < N; ++i) {
    require(arr[i].is_number_unsigned(),
            std::string(key) + " entries must be non-negative integers");
    dst[i] = arr[i].get<std::size_t>();
  }
}

void read_count(const json& j, const char* key, std::size_t& dst) {
  if (!j.contains(key)) return;
  require(j.at(key).is_number_unsigned(),
          std::string(key) + " must be a non-negative integer");
  dst = j.at(key).get<std::size_t>();
}

}  // namespace

void ModelConfig::validate() const {
  require(heads >= 1, "heads must be >= 1");
  require(window % 2 == 1, "window must be odd");
  require(mlp_ratio >= 1, "mlp_ratio must be >= 1");
  require(channels.back() == latent_channels,
          "last main stage width must equal latent_channels");
  require(latent_channels % 8 == 0,
          "latent_channels must be divisible by 8 for the channel groups");
  for (std::size_t c : channels) {
    require(c > 0 && c % heads == 0,
            "every stage width must be a positive multiple of heads");
  }
  require(hyper_channels > 0 && hyper_channels % heads == 0,
          "hyper_channels must be a positive multiple of heads");
  for (std::size_t k : kernel_sizes) {
    require(k == 3 || k == 5, "kernel sizes must be 3 or 5");
  }
}

std::string ModelConfig::to_json() const {
  json j;
  j["depths"] = depths;
  j["channels"] = channels;
  j["kernel_sizes"] = kernel_sizes;
  j["window"] = window;
  j["heads"] = heads;
  j["mlp_ratio"] = mlp_ratio;
  j["latent_channels"] = latent_channels;
  j["hyper_channels"] = hyper_channels;
  return j.dump();
}

ModelConfig ModelConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("model config: invalid JSON: ") + e.what());
  }
  require(j.is_object(), "top level must be an object");
  static const char* const kKnown[] = {
      "depths",    "channels",  "kernel_sizes",    "window",
      "heads",     "mlp_ratio", "latent_channels", "hyper_channels"};
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || item.key() == k;
    require(known, "unknown field '" + item.key() + "'");
  }
  ModelConfig cfg;
  read_array(j, "depths", cfg.depths);
  read_array(j, "channels", cfg.channels);
  read_array(j, "kernel_sizes", cfg.kernel_sizes);
  read_count(j, "window", cfg.window);
  read_count(j, "heads", cfg.heads);
  read_count(j, "mlp_ratio", cfg.mlp_ratio);
  read_count(j, "latent_channels", cfg.latent_channels);
  read_count(j, "hyper_channels", cfg.hyper_channels);
  cfg.validate();
  return cfg;
}

ModelConfig ModelConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::uint64_t ModelConfig::hash() const {
  // Fixed field order; to_json() sorts keys so it is canonical as well.
  return fnv1a64(to_json());
}

std::vector<StageLayout> stage_layouts(const ModelConfig& cfg, Network net) {
  const auto& ch = cfg.channels;
  const auto& k = cfg.kernel_sizes;
  const auto& d = cfg.depths;
  const std::size_t img = ModelConfig::kImageChannels;
  const std::size_t cy = cfg.latent_channels;
  const std::size_t cz = cfg.hyper_channels;
  const auto stage = [](const char* net_name, int i) {
    return std::string(net_name) + ".stage" + std::to_string(i);
  };

  switch (net) {
    case Network::kMainEncoder:
      return {
          {stage("main_enc", 1), Direction::kDown, img, ch[0], k[0], d[0]},
          {stage("main_enc", 2), Direction::kDown, ch[0], ch[1], k[1], d[1]},
          {stage("main_enc", 3), Direction::kDown, ch[1], ch[2], k[2], d[2]},
          {stage("main_enc", 4), Direction::kDown, ch[2], ch[3], k[3], d[3]},
      };
    case Network::kMainDecoder:
      return {
          {stage("main_dec", 4), Direction::kUp, ch[3], ch[2], k[3], d[3]},
          {stage("main_dec", 3), Direction::kUp, ch[2], ch[1], k[2], d[2]},
          {stage("main_dec", 2), Direction::kUp, ch[1], ch[0], k[1], d[1]},
          {stage("main_dec", 1), Direction::kUp, ch[0], img, k[0], d[0]},
      };
    case Network::kHyperEncoder:
      return {
          {stage("hyper_enc", 1), Direction::kDown, cy, cz, k[4], d[4]},
          {stage("hyper_enc", 2), Direction::kDown, cz, cz, k[5], d[5]},
      };
    case Network::kHyperDecoder:
      // The last unit widens to 2 * C_y: mean and scale context halves.
      return {
          {stage("hyper_dec", 2), Direction::kUp, cz, cz, k[5], d[5]},
          {stage("hyper_dec", 1), Direction::kUp, cz, 2 * cy, k[4], d[4]},
      };
  }
  return {};
}

}  // namespace tinylic
