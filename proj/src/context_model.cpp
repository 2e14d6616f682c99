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

#include "tinylic/context_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "tinylic/entropy_models.hpp"
#include "tinylic/errors.hpp"
#include "tinylic/range_coder.hpp"
#include "tinylic/weights.hpp"

namespace tinylic {
namespace {

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

void check_psi(const Tensor& psi, std::size_t latent_channels) {
  if (psi.channels() != 2 * latent_channels) {
    throw ShapeError("context model: hyper features have " +
                     std::to_string(psi.channels()) + " channels, expected " +
                     std::to_string(2 * latent_channels));
  }
}

void check_weights(const McmWeights& w, std::size_t latent_channels) {
  if (w.latent_channels != latent_channels || w.nets.size() != kGroupCount) {
    throw ConfigError("context model weights do not match " +
                      std::to_string(latent_channels) + " latent channels");
  }
}

// Evaluates the parameter network of one group at a single position. All
// positions are independent, so any subset gives the same bits as the full
// map.
class ParamEvaluator {
 public:
  ParamEvaluator(const ContextState& state, const McmWeights& weights,
                 std::size_t group)
      : state_(state),
        net_(weights.nets[group]),
        count_(weights.groups[group].count),
        input_(net_.conv1.in_channels()),
        hidden_(net_.conv1.out_channels()),
        output_(net_.conv2.out_channels()) {}

  void operator()(std::size_t y, std::size_t x, double* mu, double* sigma) {
    const auto psi = state_.psi().at(y, x);
    const auto dec = state_.decoded().at(y, x);
    std::copy(psi.begin(), psi.end(), input_.begin());
    for (std::size_t c = 0; c < dec.size(); ++c) {
      input_[psi.size() + c] = state_.occupied(y, x, c) ? dec[c] : 0.0;
    }
    pointwise(net_.conv1, input_, hidden_);
    for (double& h : hidden_) h = gelu(h);
    pointwise(net_.conv2, hidden_, output_);
    for (std::size_t j = 0; j < count_; ++j) {
      mu[j] = output_[j];
      sigma[j] = std::max(softplus(output_[count_ + j]), kSigmaMin);
    }
  }

 private:
  // 1x1 convolution at one position, accumulated in input-channel order.
  static void pointwise(const ConvKernel& k, std::span<const double> in,
                        std::span<double> out) {
    const auto w = k.weights();
    const auto b = k.bias();
    const std::size_t n_out = k.out_channels();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < in.size(); ++i) {
      const double v = in[i];
      const double* row = w.data() + i * n_out;
      for (std::size_t o = 0; o < n_out; ++o) out[o] += row[o] * v;
    }
    for (std::size_t o = 0; o < n_out; ++o) out[o] += b[o];
  }

  const ContextState& state_;
  const EntropyParamNet& net_;
  std::size_t count_;
  std::vector<double> input_;
  std::vector<double> hidden_;
  std::vector<double> output_;
};

// (mu, sigma) for every (position, group channel) of a phase, position-major.
void phase_params(const ContextState& state, const McmWeights& weights,
                  std::size_t group, std::span<const Position> positions,
                  std::vector<double>& mu, std::vector<double>& sigma) {
  const std::size_t count = weights.groups[group].count;
  mu.resize(positions.size() * count);
  sigma.resize(positions.size() * count);
  ParamEvaluator eval(state, weights, group);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    eval(positions[i].y, positions[i].x, mu.data() + i * count,
         sigma.data() + i * count);
  }
}

template <typename SymbolFn>
McmEncoding encode_steps(const Tensor& psi, const McmWeights& weights,
                         const McmObserver& observer, SymbolFn&& symbol_at) {
  const std::size_t cy = weights.latent_channels;
  check_psi(psi, cy);
  check_weights(weights, cy);
  const std::size_t h = psi.height();
  const std::size_t w = psi.width();

  McmEncoding result{{}, SymbolPlane(Shape{h, w, cy}), Tensor(h, w, cy), 0, {}};
  ContextState state(psi, cy);
  std::vector<double> mu, sigma, committed;
  const auto& schedule = mcm_schedule();
  for (std::size_t step = 0; step < schedule.size(); ++step) {
    const auto [group, phase] = schedule[step];
    const ChannelRange range = weights.groups[group];
    const auto positions = spatial_phases(group + 1, h, w)[phase];
    phase_params(state, weights, group, positions, mu, sigma);

    RangeEncoder enc;
    double bits = 0.0;
    committed.clear();
    for (std::size_t i = 0; i < positions.size(); ++i) {
      const auto [y, x] = positions[i];
      for (std::size_t j = 0; j < range.count; ++j) {
        const std::size_t c = range.first + j;
        const std::size_t k = i * range.count + j;
        bool clamped = false;
        const std::int32_t s = symbol_at(y, x, c, mu[k], &clamped);
        result.clamped += clamped;
        const CdfTable table = build_cdf(gaussian_pmf(sigma[k]));
        const std::uint32_t index = symbol_to_index(s);
        enc.encode(index, table);
        bits += symbol_bits(table, index);
        const double value = static_cast<double>(s) + mu[k];
        committed.push_back(value);
        result.symbols(y, x, c) = s;
        result.y_hat(y, x, c) = value;
      }
    }
    result.streams.push_back(std::move(enc).finish());
    result.estimated_bits.push_back(bits);
    state.commit(committed);
    if (observer) observer(step, state);
  }
  return result;
}

}  // namespace

GroupPlan partition_channels(std::size_t latent_channels) {
  if (latent_channels == 0 || latent_channels % 8 != 0) {
    throw ConfigError("latent channel count " + std::to_string(latent_channels) +
                      " is not divisible by 8");
  }
  const std::size_t unit = latent_channels / 8;
  const std::array<std::size_t, kGroupCount> sizes{unit, unit, 2 * unit,
                                                   4 * unit};
  GroupPlan plan;
  std::size_t first = 0;
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    plan[g] = {first, sizes[g]};
    first += sizes[g];
  }
  return plan;
}

std::vector<std::vector<Position>> spatial_phases(std::size_t stage,
                                                  std::size_t height,
                                                  std::size_t width) {
  if (stage < 1 || stage > kGroupCount) {
    throw InputError("spatial_phases: stage must be in 1..4");
  }
  const std::size_t count = phase_count(stage - 1);
  std::vector<std::vector<Position>> phases(count);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t key =
          count == 4 ? (y % 2) * 2 + (x % 2) : (y + x) % 2;
      phases[key].push_back({y, x});
    }
  }
  return phases;
}

const std::array<ScheduleStep, kStreamCount>& mcm_schedule() {
  static const std::array<ScheduleStep, kStreamCount> kSchedule = [] {
    std::array<ScheduleStep, kStreamCount> s{};
    std::size_t i = 0;
    for (std::size_t g = 0; g < kGroupCount; ++g) {
      for (std::size_t p = 0; p < phase_count(g); ++p) s[i++] = {g, p};
    }
    return s;
  }();
  return kSchedule;
}

std::size_t schedule_index(std::size_t group, std::size_t phase) {
  if (group >= kGroupCount || phase >= phase_count(group)) {
    throw InputError("no schedule step for group " + std::to_string(group) +
                     ", phase " + std::to_string(phase));
  }
  std::size_t i = 0;
  for (std::size_t g = 0; g < group; ++g) i += phase_count(g);
  return i + phase;
}

McmWeights McmWeights::from_store(const WeightStore& ws,
                                  const ModelConfig& cfg) {
  const std::size_t cy = cfg.latent_channels;
  McmWeights w;
  w.latent_channels = cy;
  w.groups = partition_channels(cy);
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    const std::string prefix = "mcm.group" + std::to_string(g + 1);
    const std::size_t hidden = kContextHiddenFactor * cy;
    w.nets.push_back(
        {ConvKernel(1, kContextInputFactor * cy, hidden, 1,
                    ws.at(prefix + ".conv1.weight").values,
                    ws.at(prefix + ".conv1.bias").values),
         ConvKernel(1, hidden, 2 * w.groups[g].count, 1,
                    ws.at(prefix + ".conv2.weight").values,
                    ws.at(prefix + ".conv2.bias").values)});
  }
  return w;
}

ContextState::ContextState(Tensor psi, std::size_t latent_channels)
    : psi_(std::move(psi)),
      decoded_(psi_.height(), psi_.width(), latent_channels),
      occupancy_(decoded_.size(), 0),
      groups_(partition_channels(latent_channels)) {
  check_psi(psi_, latent_channels);
}

void ContextState::commit(std::span<const double> values) {
  if (completed_ >= kStreamCount) {
    throw SchedulingError("context state: every step is already committed");
  }
  const auto [group, phase] = mcm_schedule()[completed_];
  const ChannelRange range = groups_[group];
  const auto positions =
      spatial_phases(group + 1, decoded_.height(), decoded_.width())[phase];
  if (values.size() != positions.size() * range.count) {
    throw SchedulingError("context state: step " + std::to_string(completed_) +
                          " expects " +
                          std::to_string(positions.size() * range.count) +
                          " values, got " + std::to_string(values.size()));
  }
  std::size_t k = 0;
  for (const Position& p : positions) {
    for (std::size_t j = 0; j < range.count; ++j, ++k) {
      const std::size_t off = decoded_.offset(p.y, p.x, range.first + j);
      decoded_.values()[off] = values[k];
      occupancy_[off] = 1;
    }
  }
  ++completed_;
}

bool ContextState::bitwise_equal(const ContextState& other) const {
  return completed_ == other.completed_ && occupancy_ == other.occupancy_ &&
         psi_.bitwise_equal(other.psi_) &&
         decoded_.bitwise_equal(other.decoded_);
}

EntropyParams entropy_params(const ContextState& state, std::size_t group,
                             std::size_t phase, const McmWeights& weights) {
  const std::size_t cy = state.decoded().channels();
  check_weights(weights, cy);
  const std::size_t step = schedule_index(group, phase);
  if (state.completed_steps() != step) {
    throw SchedulingError(
        "entropy_params: step " + std::to_string(step) + " requested but " +
        std::to_string(state.completed_steps()) + " steps are committed");
  }
  const std::size_t h = state.psi().height();
  const std::size_t w = state.psi().width();
  const std::size_t count = weights.groups[group].count;
  EntropyParams out{Tensor(h, w, count), Tensor(h, w, count)};
  ParamEvaluator eval(state, weights, group);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      eval(y, x, out.mu.at(y, x).data(), out.sigma.at(y, x).data());
    }
  }
  return out;
}

McmEncoding mcm_quantize_encode(const Tensor& y_scaled, const Tensor& psi,
                                const McmWeights& weights,
                                const McmObserver& observer) {
  if (y_scaled.height() != psi.height() || y_scaled.width() != psi.width() ||
      y_scaled.channels() != weights.latent_channels) {
    throw ShapeError("mcm_quantize_encode: latent and hyper features disagree");
  }
  return encode_steps(psi, weights, observer,
                      [&](std::size_t y, std::size_t x, std::size_t c,
                          double mu, bool* clamped) {
                        return quantize_value(y_scaled(y, x, c), mu, clamped);
                      });
}

std::vector<Stream> mcm_encode(const SymbolPlane& symbols, const Tensor& psi,
                               const McmWeights& weights,
                               const McmObserver& observer) {
  if (symbols.shape !=
      Shape{psi.height(), psi.width(), weights.latent_channels}) {
    throw ShapeError("mcm_encode: symbol plane and hyper features disagree");
  }
  for (std::int32_t s : symbols.values) {
    if (s < kSymbolMin || s > kSymbolMax) {
      throw InputError("mcm_encode: symbol " + std::to_string(s) +
                       " outside [-64, 64]");
    }
  }
  return encode_steps(psi, weights, observer,
                      [&](std::size_t y, std::size_t x, std::size_t c, double,
                          bool* clamped) {
                        *clamped = false;
                        return symbols(y, x, c);
                      })
      .streams;
}

McmDecoding mcm_decode(std::span<const Stream> streams, const Tensor& psi,
                       const McmWeights& weights, const McmObserver& observer) {
  const std::size_t cy = weights.latent_channels;
  check_psi(psi, cy);
  check_weights(weights, cy);
  if (streams.size() != kStreamCount) {
    throw CorruptStreamError("expected " + std::to_string(kStreamCount) +
                             " latent streams, got " +
                             std::to_string(streams.size()));
  }
  const std::size_t h = psi.height();
  const std::size_t w = psi.width();
  McmDecoding result{SymbolPlane(Shape{h, w, cy}), Tensor(h, w, cy)};
  ContextState state(psi, cy);
  std::vector<double> mu, sigma, committed;
  const auto& schedule = mcm_schedule();
  for (std::size_t step = 0; step < schedule.size(); ++step) {
    const auto [group, phase] = schedule[step];
    const ChannelRange range = weights.groups[group];
    const auto positions = spatial_phases(group + 1, h, w)[phase];
    phase_params(state, weights, group, positions, mu, sigma);

    RangeDecoder dec(streams[step]);
    committed.clear();
    for (std::size_t i = 0; i < positions.size(); ++i) {
      const auto [y, x] = positions[i];
      for (std::size_t j = 0; j < range.count; ++j) {
        const std::size_t k = i * range.count + j;
        const CdfTable table = build_cdf(gaussian_pmf(sigma[k]));
        const int s = index_to_symbol(
            static_cast<std::uint32_t>(dec.decode(table)));
        const double value = static_cast<double>(s) + mu[k];
        committed.push_back(value);
        result.symbols(y, x, range.first + j) = s;
        result.y_hat(y, x, range.first + j) = value;
      }
    }
    dec.finish();
    state.commit(committed);
    if (observer) observer(step, state);
  }
  return result;
}

}  // namespace tinylic
