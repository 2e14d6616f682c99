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

#ifndef TINYLIC_WEIGHTS_HPP_
#define TINYLIC_WEIGHTS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tinylic/model_config.hpp"

namespace tinylic {

struct ParamArray {
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

enum class ParamInit {
  kFanIn,  // uniform with variance 1 / fan_in
  kZero,
  kOne,
};

struct ParamSpec {
  std::string path;
  std::vector<std::size_t> shape;
  ParamInit init = ParamInit::kZero;
  std::size_t fan_in = 0;
};

// Every parameter demanded by `cfg`, sorted lexicographically by path.
std::vector<ParamSpec> enumerate_parameters(const ModelConfig& cfg);

// Flat map from canonical parameter path to its array. Immutable once built
// by init_weights() or load_weights().
class WeightStore {
 public:
  WeightStore() = default;
  explicit WeightStore(std::uint64_t config_hash) : config_hash_(config_hash) {}

  // Throws WeightLoadError on duplicate paths.
  void insert(std::string path, ParamArray array);

  bool contains(std::string_view path) const;
  // Throws WeightLoadError if absent.
  const ParamArray& at(std::string_view path) const;

  const std::map<std::string, ParamArray, std::less<>>& entries() const {
    return entries_;
  }
  std::size_t parameter_count() const;
  std::uint64_t config_hash() const { return config_hash_; }

  bool bitwise_equal(const WeightStore& other) const;

 private:
  std::uint64_t config_hash_ = 0;
  std::map<std::string, ParamArray, std::less<>> entries_;
};

// Fills every parameter from a PRNG stream keyed by (seed, path), so the
// value of one parameter never depends on which others exist.
WeightStore init_weights(const ModelConfig& cfg, std::uint64_t seed);

// Throws WeightLoadError naming the first missing, extra or misshapen path.
void check_compatible(const WeightStore& ws, const ModelConfig& cfg);

// "TLWT" container: magic, version byte, config hash (u64 LE), then one
// record per parameter: u32 path length, path bytes, dtype tag (1 = f64),
// u8 rank, u32 dims, raw little-endian doubles. All integers little-endian.
inline constexpr std::uint8_t kWeightFileVersion = 1;

std::vector<std::uint8_t> save_weights(const WeightStore& ws);
WeightStore load_weights(std::span<const std::uint8_t> bytes,
                         const ModelConfig& cfg);

void save_weights_file(const WeightStore& ws, const std::string& path);
WeightStore load_weights_file(const std::string& path, const ModelConfig& cfg);

}  // namespace tinylic

#endif  // TINYLIC_WEIGHTS_HPP_
