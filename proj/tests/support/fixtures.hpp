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

// Seeded inputs and probes shared by the context-model tests and the
// acceptance binary.

#ifndef TINYLIC_TESTS_FIXTURES_HPP_
#define TINYLIC_TESTS_FIXTURES_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tinylic/codec.hpp"
#include "tinylic/context_model.hpp"
#include "tinylic/image.hpp"
#include "tinylic/quantizer.hpp"
#include "tinylic/tensor.hpp"

namespace tinylic::fixture {

inline Tensor random_psi(std::mt19937_64& rng, std::size_t h, std::size_t w,
                         std::size_t latent_channels) {
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor psi(h, w, 2 * latent_channels);
  for (double& v : psi.values()) v = n(rng);
  return psi;
}

// Symbols with a heavy center and occasional far outliers up to the clamp.
inline SymbolPlane random_symbols(std::mt19937_64& rng, Shape shape) {
  std::normal_distribution<double> n(0.0, 2.5);
  SymbolPlane s(shape);
  for (auto& v : s.values) {
    if (rng() % 50 == 0) {
      v = static_cast<std::int32_t>(rng() % kAlphabetSize) + kSymbolMin;
    } else {
      v = static_cast<std::int32_t>(
          std::clamp(std::lround(n(rng)), long{kSymbolMin}, long{kSymbolMax}));
    }
  }
  return s;
}

// Step at which (y, x, c) is coded.
inline std::size_t step_of(const GroupPlan& groups, std::size_t y, std::size_t x,
                           std::size_t c) {
  std::size_t g = 0;
  while (c >= groups[g].first + groups[g].count) ++g;
  const std::size_t phase = g == 0 ? (y % 2) * 2 + (x % 2) : (y + x) % 2;
  return schedule_index(g, phase);
}

// Smooth-ish seeded RGB image so the transforms see some structure.
inline Image random_image(std::uint64_t seed, std::uint32_t w, std::uint32_t h) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double fx = 0.05 + 0.3 * u(rng);
  const double fy = 0.05 + 0.3 * u(rng);
  const double phase = 6.28 * u(rng);
  Image img(w, h);
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double base = 127.5 + 90.0 * std::sin(fx * x + fy * y + phase + c);
        const double noise = 40.0 * (u(rng) - 0.5);
        img.at(y, x, c) = static_cast<std::uint8_t>(
            std::clamp(std::lround(base + noise), 0L, 255L));
      }
    }
  }
  return img;
}

// Re-codes `symbols` once per step with every cell scheduled after that step
// randomized, and reports the first step whose streams [0, step] changed, or
// kStreamCount when none did.
inline std::size_t causality_violation(const SymbolPlane& symbols,
                                       const Tensor& psi,
                                       const McmWeights& weights,
                                       std::mt19937_64& rng) {
  const auto reference = mcm_encode(symbols, psi, weights);
  for (std::size_t step = 0; step < kStreamCount; ++step) {
    SymbolPlane mutated = symbols;
    const SymbolPlane noise = random_symbols(rng, symbols.shape);
    for (std::size_t y = 0; y < symbols.shape.height; ++y) {
      for (std::size_t x = 0; x < symbols.shape.width; ++x) {
        for (std::size_t c = 0; c < symbols.shape.channels; ++c) {
          if (step_of(weights.groups, y, x, c) > step) mutated(y, x, c) = noise(y, x, c);
        }
      }
    }
    const auto streams = mcm_encode(mutated, psi, weights);
    for (std::size_t k = 0; k <= step; ++k) {
      if (streams[k] != reference[k]) return step;
    }
  }
  return kStreamCount;
}

// Overwrites every unoccupied cell of the state captured before each step
// with garbage and checks that the predicted parameters stay bitwise equal.
inline bool entropy_params_ignore_future(const SymbolPlane& symbols,
                                         const Tensor& psi,
                                         const McmWeights& weights,
                                         std::mt19937_64& rng) {
  std::vector<ContextState> before;
  before.emplace_back(psi, weights.latent_channels);
  (void)mcm_encode(symbols, psi, weights,
                   [&](std::size_t, const ContextState& s) { before.push_back(s); });
  std::normal_distribution<double> n(0.0, 50.0);
  for (std::size_t step = 0; step < kStreamCount; ++step) {
    const auto [group, phase] = mcm_schedule()[step];
    ContextState probe = before[step];
    const EntropyParams clean = entropy_params(probe, group, phase, weights);
    auto& buf = probe.decoded_buffer();
    for (std::size_t i = 0; i < buf.size(); ++i) {
      if (!probe.occupancy()[i]) buf.values()[i] = n(rng);
    }
    const EntropyParams dirty = entropy_params(probe, group, phase, weights);
    if (!clean.mu.bitwise_equal(dirty.mu) || !clean.sigma.bitwise_equal(dirty.sigma)) {
      return false;
    }
  }
  return true;
}

}  // namespace tinylic::fixture

#endif  // TINYLIC_TESTS_FIXTURES_HPP_
