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

#include "tinylic/entropy_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "tinylic/errors.hpp"
#include "tinylic/weights.hpp"

namespace tinylic {
namespace {

constexpr double kEdge = kSymbolMax - 0.5;  // 63.5

// Upper tail of the standard normal, 1 - Phi(t).
double normal_tail(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

std::vector<double> gaussian_pmf(double sigma) {
  const double s = std::max(sigma, kSigmaMin);
  std::vector<double> pmf(kAlphabetSize);
  const std::size_t zero = symbol_to_index(0);
  // Every interior bin is a difference of upper tails, which keeps the pmf
  // exactly symmetric and accurate far from the mode.
  pmf[zero] = std::erf(0.5 / (s * std::numbers::sqrt2));
  for (int k = 1; k < kSymbolMax; ++k) {
    const double mass = normal_tail((k - 0.5) / s) - normal_tail((k + 0.5) / s);
    pmf[zero + k] = mass;
    pmf[zero - k] = mass;
  }
  const double tail = normal_tail(kEdge / s);
  pmf.front() = tail;
  pmf.back() = tail;
  return pmf;
}

std::vector<double> factorized_pmf(const FactorizedParams& p) {
  if (!(p.scale > 0.0) || !std::isfinite(p.scale) || !std::isfinite(p.loc)) {
    throw InputError("factorized model needs a finite positive scale");
  }
  std::vector<double> pmf(kAlphabetSize);
  for (std::size_t i = 0; i < kAlphabetSize; ++i) {
    const int sym = index_to_symbol(static_cast<std::uint32_t>(i));
    const double lo = (sym - 0.5 - p.loc) / p.scale;
    const double hi = (sym + 0.5 - p.loc) / p.scale;
    if (sym == kSymbolMin) {
      pmf[i] = logistic(hi);
    } else if (sym == kSymbolMax) {
      pmf[i] = logistic(-lo);
    } else if (lo >= 0.0) {
      pmf[i] = logistic(-lo) - logistic(-hi);
    } else {
      pmf[i] = logistic(hi) - logistic(lo);
    }
  }
  return pmf;
}

CdfTable build_cdf(std::span<const double> pmf) {
  const std::size_t n = pmf.size();
  if (n == 0 || n > kCdfTotal) {
    throw InputError("build_cdf: pmf must have 1..65536 entries");
  }
  double sum = 0.0;
  for (double p : pmf) {
    if (!std::isfinite(p) || p < 0.0) {
      throw InputError("build_cdf: pmf entries must be finite and >= 0");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InputError("build_cdf: pmf sums to " + std::to_string(sum) +
                     ", not 1");
  }

  std::vector<std::int64_t> freq(n);
  std::vector<double> remainder(n);
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double scaled = pmf[i] * kCdfTotal;
    const double f = std::floor(scaled);
    freq[i] = static_cast<std::int64_t>(f);
    remainder[i] = scaled - f;
    assigned += freq[i];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return a > b;
  });
  // The normalization check bounds the floors by the total, so the leftover
  // is never negative.
  const auto leftover = static_cast<std::size_t>(kCdfTotal - assigned);
  for (std::size_t k = 0; k < leftover; ++k) ++freq[order[k % n]];
  for (std::size_t i = 0; i < n; ++i) {
    if (freq[i] > 0) continue;
    std::size_t donor = 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (freq[j] >= freq[donor]) donor = j;
    }
    freq[i] = 1;
    --freq[donor];
  }

  std::vector<std::uint32_t> cdf(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    cdf[i + 1] = cdf[i] + static_cast<std::uint32_t>(freq[i]);
  }
  return CdfTable(std::move(cdf));
}

double symbol_bits(const CdfTable& table, std::size_t index) {
  return kCdfPrecisionBits - std::log2(static_cast<double>(table.frequency(index)));
}

double estimate_rate(std::span<const std::uint32_t> indices,
                     std::span<const CdfTable> tables) {
  if (indices.size() != tables.size()) {
    throw InputError("estimate_rate: need exactly one table per symbol");
  }
  double bits = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= tables[i].symbol_count()) {
      throw InputError("estimate_rate: symbol outside its table");
    }
    bits += symbol_bits(tables[i], indices[i]);
  }
  return bits;
}

std::vector<FactorizedParams> load_factorized(const WeightStore& ws,
                                              const ModelConfig& cfg) {
  const auto& loc = ws.at("entropy_bottleneck.loc").values;
  const auto& scale = ws.at("entropy_bottleneck.scale").values;
  if (loc.size() != cfg.hyper_channels || scale.size() != cfg.hyper_channels) {
    throw ShapeError("entropy bottleneck parameters do not match hyper_channels");
  }
  std::vector<FactorizedParams> out(cfg.hyper_channels);
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = {loc[c], scale[c]};
  return out;
}

std::vector<CdfTable> factorized_tables(std::span<const FactorizedParams> p) {
  std::vector<CdfTable> tables;
  tables.reserve(p.size());
  for (const FactorizedParams& fp : p) {
    tables.push_back(build_cdf(factorized_pmf(fp)));
  }
  return tables;
}

}  // namespace tinylic
