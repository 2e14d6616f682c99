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

#ifndef TINYLIC_CONTEXT_MODEL_HPP_
#define TINYLIC_CONTEXT_MODEL_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tinylic/model_config.hpp"
#include "tinylic/quantizer.hpp"
#include "tinylic/tensor.hpp"

namespace tinylic {

class WeightStore;

// The parameter networks see [psi (2 C_y) | masked y_hat (C_y)] and have a
// hidden width of 2 C_y.
inline constexpr std::size_t kContextInputFactor = 3;
inline constexpr std::size_t kContextHiddenFactor = 2;

inline constexpr std::size_t kGroupCount = 4;
inline constexpr std::size_t kStreamCount = 10;

struct ChannelRange {
  std::size_t first = 0;
  std::size_t count = 0;
};
using GroupPlan = std::array<ChannelRange, kGroupCount>;

// Contiguous groups in ratio 1:1:2:4. Throws ConfigError unless C_y % 8 == 0.
GroupPlan partition_channels(std::size_t latent_channels);

struct Position {
  std::size_t y = 0;
  std::size_t x = 0;
  friend bool operator==(Position, Position) = default;
};

// Number of spatial phases coding `group` (0-based): the first group uses the
// four-step pattern keyed by (y mod 2, x mod 2), later groups the two-step
// checkerboard keyed by (y + x) mod 2.
constexpr std::size_t phase_count(std::size_t group) {
  return group == 0 ? 4 : 2;
}

// Positions of every phase of `stage` (1-based, 1..4) in coding order; each
// phase lists its positions in raster order.
std::vector<std::vector<Position>> spatial_phases(std::size_t stage,
                                                  std::size_t height,
                                                  std::size_t width);

struct ScheduleStep {
  std::size_t group = 0;  // 0-based
  std::size_t phase = 0;  // 0-based within the group
};

// The ten (group, phase) steps in coding order; step i produces stream i.
const std::array<ScheduleStep, kStreamCount>& mcm_schedule();
std::size_t schedule_index(std::size_t group, std::size_t phase);

// 1x1 conv -> GELU -> 1x1 conv producing (mu, raw sigma) for one group.
struct EntropyParamNet {
  ConvKernel conv1;
  ConvKernel conv2;
};

struct McmWeights {
  std::size_t latent_channels = 0;
  GroupPlan groups{};
  std::vector<EntropyParamNet> nets;  // one per group

  static McmWeights from_store(const WeightStore& ws, const ModelConfig& cfg);
};

// Everything the parameter networks may look at: the hyper features and the
// latent values decoded so far. `decoded` holds mean-shifted reconstructions
// s + mu in the scaled domain; cells not yet coded are zero.
class ContextState {
 public:
  ContextState(Tensor psi, std::size_t latent_channels);

  const Tensor& psi() const { return psi_; }
  const Tensor& decoded() const { return decoded_; }
  // Mutable access for probing; the parameter networks ignore unoccupied
  // cells regardless of their content.
  Tensor& decoded_buffer() { return decoded_; }

  bool occupied(std::size_t y, std::size_t x, std::size_t c) const {
    return occupancy_[decoded_.offset(y, x, c)] != 0;
  }
  std::span<const std::uint8_t> occupancy() const { return occupancy_; }
  std::size_t completed_steps() const { return completed_; }
  const GroupPlan& groups() const { return groups_; }

  // Records the values of the next scheduled step. `values` holds one entry
  // per (position, group channel), positions in phase order.
  void commit(std::span<const double> values);

  bool bitwise_equal(const ContextState& other) const;

 private:
  Tensor psi_;
  Tensor decoded_;
  std::vector<std::uint8_t> occupancy_;
  GroupPlan groups_;
  std::size_t completed_ = 0;
};

struct EntropyParams {
  Tensor mu;     // h x w x |group|
  Tensor sigma;  // floored at kSigmaMin
};

// (mu, sigma) of `group` at every position. Throws SchedulingError unless
// `state` has completed exactly the steps before (group, phase).
EntropyParams entropy_params(const ContextState& state, std::size_t group,
                             std::size_t phase, const McmWeights& weights);

using Stream = std::vector<std::uint8_t>;
// Called after every step with the state both sides hold at that point.
using McmObserver = std::function<void(std::size_t step, const ContextState&)>;

struct McmEncoding {
  std::vector<Stream> streams;
  SymbolPlane symbols;
  Tensor y_hat;  // s + mu, scaled domain
  std::size_t clamped = 0;
  std::vector<double> estimated_bits;  // per stream
};

// Forms symbols from the scaled latent with the means predicted step by step
// and codes them into kStreamCount streams.
McmEncoding mcm_quantize_encode(const Tensor& y_scaled, const Tensor& psi,
                                const McmWeights& weights,
                                const McmObserver& observer = {});

// Codes already-formed symbols.
std::vector<Stream> mcm_encode(const SymbolPlane& symbols, const Tensor& psi,
                               const McmWeights& weights,
                               const McmObserver& observer = {});

struct McmDecoding {
  SymbolPlane symbols;
  Tensor y_hat;  // s + mu, scaled domain
};

// Throws CorruptStreamError on desynchronization, truncation or leftover
// bytes in any stream.
McmDecoding mcm_decode(std::span<const Stream> streams, const Tensor& psi,
                       const McmWeights& weights,
                       const McmObserver& observer = {});

}  // namespace tinylic

#endif  // TINYLIC_CONTEXT_MODEL_HPP_
