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

#ifndef TINYLIC_ENTROPY_MODELS_HPP_
#define TINYLIC_ENTROPY_MODELS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "tinylic/model_config.hpp"
#include "tinylic/quantizer.hpp"
#include "tinylic/range_coder.hpp"

namespace tinylic {

class WeightStore;

inline constexpr double kSigmaMin = 0.04;

// Zero-mean discretized Gaussian over the symbol alphabet (129 entries,
// index 0 = symbol -64). Mass beyond +/-63.5 is folded into the edge symbols.
// sigma is floored at kSigmaMin first.
std::vector<double> gaussian_pmf(double sigma);

// Per-channel logistic prior of the hyper latent.
struct FactorizedParams {
  double loc = 0.0;
  double scale = 1.0;
};

// Logistic bin masses centered at loc, same support and tail folding as
// gaussian_pmf. Throws InputError if scale <= 0.
std::vector<double> factorized_pmf(const FactorizedParams& p);

// Quantizes a pmf (sum 1 within 1e-9) to a 16-bit cdf: floor, hand the
// remaining counts to the largest remainders (higher index on ties), then
// lift empty bins to 1 by taking from the currently largest bin (higher index
// on ties).
CdfTable build_cdf(std::span<const double> pmf);

// -log2(freq / 65536) of one coded symbol.
double symbol_bits(const CdfTable& table, std::size_t index);

// Ideal code length of `indices` under the matching `tables`.
double estimate_rate(std::span<const std::uint32_t> indices,
                     std::span<const CdfTable> tables);

// Per-channel tables of the hyper latent model stored in `ws`.
std::vector<FactorizedParams> load_factorized(const WeightStore& ws,
                                              const ModelConfig& cfg);
std::vector<CdfTable> factorized_tables(std::span<const FactorizedParams> p);

}  // namespace tinylic

#endif  // TINYLIC_ENTROPY_MODELS_HPP_
