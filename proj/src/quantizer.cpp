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

#include "tinylic/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tinylic/errors.hpp"

namespace tinylic {

QualityFactor QualityFactor::from_q88(std::uint16_t raw) {
  if (raw == 0) throw InputError("quality factor must be positive");
  return QualityFactor(raw);
}

QualityFactor QualityFactor::from_real(double sf) {
  const double raw = std::round(sf * 256.0);
  if (!std::isfinite(sf) || raw < 1.0 || raw > 65535.0) {
    throw InputError("quality factor " + std::to_string(sf) +
                     " outside [1/256, 255 + 255/256]");
  }
  return QualityFactor(static_cast<std::uint16_t>(raw));
}

Tensor apply_sf(const Tensor& y, QualityFactor q) {
  Tensor out = y;
  const double sf = q.value();
  for (double& v : out.values()) v *= sf;
  return out;
}

Tensor remove_sf(const Tensor& y_scaled, QualityFactor q) {
  Tensor out = y_scaled;
  const double sf = q.value();
  for (double& v : out.values()) v /= sf;
  return out;
}

std::int32_t quantize_value(double value, double mean, bool* clamped) {
  const double r = std::round(value - mean);
  const double c = std::clamp(r, static_cast<double>(kSymbolMin),
                              static_cast<double>(kSymbolMax));
  if (clamped) *clamped = (c != r);
  return static_cast<std::int32_t>(c);
}

QuantizedPlane quantize_residual(const Tensor& y_scaled, const Tensor& mu) {
  if (y_scaled.shape() != mu.shape()) {
    throw ShapeError("quantize_residual: latent and mean shapes differ");
  }
  QuantizedPlane out{SymbolPlane(y_scaled.shape()), 0};
  const auto y = y_scaled.values();
  const auto m = mu.values();
  for (std::size_t i = 0; i < y.size(); ++i) {
    bool clamped = false;
    out.symbols.values[i] = quantize_value(y[i], m[i], &clamped);
    out.clamped += clamped;
  }
  return out;
}

Tensor dequantize(const SymbolPlane& s, const Tensor& mu, QualityFactor q) {
  if (s.shape != mu.shape()) {
    throw ShapeError("dequantize: symbol and mean shapes differ");
  }
  Tensor out = mu;
  const double sf = q.value();
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = (static_cast<double>(s.values[i]) + v[i]) / sf;
  }
  return out;
}

}  // namespace tinylic
