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

#ifndef TINYLIC_MODEL_CONFIG_HPP_
#define TINYLIC_MODEL_CONFIG_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tinylic {

// Shape-defining hyperparameters of the codec. Depths 1-4 belong to the main
// encoder/decoder stages and depths 5-6 to the two hyper stages.
struct ModelConfig {
  static constexpr std::size_t kMainStages = 4;
  static constexpr std::size_t kHyperStages = 2;
  static constexpr std::size_t kImageChannels = 3;

  std::array<std::size_t, 6> depths{1, 1, 2, 2, 1, 1};
  // Output width of each main encoder stage; the last equals latent_channels.
  std::array<std::size_t, 4> channels{16, 32, 48, 64};
  std::array<std::size_t, 6> kernel_sizes{5, 3, 3, 5, 3, 3};
  std::size_t window = 5;
  std::size_t heads = 2;
  std::size_t mlp_ratio = 2;
  std::size_t latent_channels = 64;
  std::size_t hyper_channels = 32;

  // Throws ConfigError describing the first violated constraint.
  void validate() const;

  std::string to_json() const;
  static ModelConfig from_json(std::string_view text);
  static ModelConfig load(const std::string& path);

  // Stable over the field values; written into weight files.
  std::uint64_t hash() const;
  // One-byte tag stored in bitstream headers (low byte of hash()).
  std::uint8_t id() const { return static_cast<std::uint8_t>(hash() & 0xff); }

  // Total spatial downsampling of the latent and of the hyper latent.
  static constexpr std::size_t kLatentStride = 16;
  static constexpr std::size_t kHyperStride = 64;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum class Direction { kDown, kUp };

enum class Network { kMainEncoder, kMainDecoder, kHyperEncoder, kHyperDecoder };

// One ICSA unit as laid out in the weight store. Down units resample from
// in -> out and then run `depth` blocks at `out`; up units run the blocks at
// `in` and then resample to `out`.
struct StageLayout {
  std::string prefix;  // e.g. "main_enc.stage2"
  Direction direction;
  std::size_t in_channels;
  std::size_t out_channels;
  std::size_t kernel;
  std::size_t depth;

  std::size_t block_channels() const {
    return direction == Direction::kDown ? out_channels : in_channels;
  }
};

// Stages of `net` in application order.
std::vector<StageLayout> stage_layouts(const ModelConfig& cfg, Network net);

}  // namespace tinylic

#endif  // TINYLIC_MODEL_CONFIG_HPP_
