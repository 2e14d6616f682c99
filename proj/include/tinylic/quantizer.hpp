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

#ifndef TINYLIC_QUANTIZER_HPP_
#define TINYLIC_QUANTIZER_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tinylic/tensor.hpp"

namespace tinylic {

// Coded symbols live in [-64, 64]; index = symbol + 64.
inline constexpr int kSymbolMin = -64;
inline constexpr int kSymbolMax = 64;
inline constexpr std::size_t kAlphabetSize = kSymbolMax - kSymbolMin + 1;

constexpr std::uint32_t symbol_to_index(int s) {
  return static_cast<std::uint32_t>(s - kSymbolMin);
}
constexpr int index_to_symbol(std::uint32_t i) {
  return static_cast<int>(i) + kSymbolMin;
}

// Quality scaling factor, carried as unsigned Q8.8 fixed point. The value
// used for coding is always the fixed-point one, so encoder and decoder agree.
class QualityFactor {
 public:
  // Raw Q8.8 word; 0 is rejected.
  static QualityFactor from_q88(std::uint16_t raw);
  // Rounds to the nearest representable value; throws InputError when the
  // result falls outside [1/256, 255 + 255/256].
  static QualityFactor from_real(double sf);

  std::uint16_t q88() const { return raw_; }
  double value() const { return raw_ / 256.0; }

  friend bool operator==(QualityFactor, QualityFactor) = default;

 private:
  explicit QualityFactor(std::uint16_t raw) : raw_(raw) {}
  std::uint16_t raw_;
};

// Integer symbols sharing the geometry of the latent slice they encode.
struct SymbolPlane {
  Shape shape;
  std::vector<std::int32_t> values;

  explicit SymbolPlane(Shape s) : shape(s), values(s.elements(), 0) {}

  std::int32_t operator()(std::size_t y, std::size_t x, std::size_t c) const {
    return values[(y * shape.width + x) * shape.channels + c];
  }
  std::int32_t& operator()(std::size_t y, std::size_t x, std::size_t c) {
    return values[(y * shape.width + x) * shape.channels + c];
  }
  friend bool operator==(const SymbolPlane&, const SymbolPlane&) = default;
};

Tensor apply_sf(const Tensor& y, QualityFactor q);
Tensor remove_sf(const Tensor& y_scaled, QualityFactor q);

// round-half-away-from-zero of (value - mean), clamped to the symbol range.
// Sets *clamped when the clamp changed the result.
std::int32_t quantize_value(double value, double mean, bool* clamped = nullptr);

struct QuantizedPlane {
  SymbolPlane symbols;
  std::size_t clamped = 0;  // positions where the clamp was active
};

QuantizedPlane quantize_residual(const Tensor& y_scaled, const Tensor& mu);
// (s + mu) / sf.
Tensor dequantize(const SymbolPlane& s, const Tensor& mu, QualityFactor q);

}  // namespace tinylic

#endif  // TINYLIC_QUANTIZER_HPP_
