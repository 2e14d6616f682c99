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

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tinylic/errors.hpp"
#include "tinylic/quantizer.hpp"

namespace tinylic {
namespace {

TEST_CASE("symbol index mapping") {
  CHECK(symbol_to_index(-64) == 0);
  CHECK(symbol_to_index(0) == 64);
  CHECK(symbol_to_index(64) == 128);
  CHECK(kAlphabetSize == 129);
  for (int s = kSymbolMin; s <= kSymbolMax; ++s) {
    CHECK(index_to_symbol(symbol_to_index(s)) == s);
  }
}

TEST_CASE("quality factor is exact Q8.8") {
  const QualityFactor q = QualityFactor::from_real(1.5);
  CHECK(q.q88() == 0x0180);
  CHECK(q.value() == 1.5);
  CHECK(QualityFactor::from_q88(0x0180) == q);
  CHECK(QualityFactor::from_real(1.0).q88() == 0x0100);
  CHECK(QualityFactor::from_real(0.5).q88() == 0x0080);
  CHECK(QualityFactor::from_real(1.0 + 1.0 / 1024).q88() == 0x0100);
  CHECK(QualityFactor::from_real(1.0 + 3.0 / 1024).q88() == 0x0101);
  CHECK_THROWS_AS(QualityFactor::from_q88(0), InputError);
  CHECK_THROWS_AS(QualityFactor::from_real(0.0), InputError);
  CHECK_THROWS_AS(QualityFactor::from_real(-1.0), InputError);
  CHECK_THROWS_AS(QualityFactor::from_real(300.0), InputError);
  CHECK_THROWS_AS(QualityFactor::from_real(std::nan("")), InputError);
}

TEST_CASE("apply_sf scales and remove_sf inverts") {
  const Tensor y(Shape{1, 1, 1}, {0.3});
  CHECK(apply_sf(y, QualityFactor::from_real(1.0)).bitwise_equal(y));
  CHECK(apply_sf(y, QualityFactor::from_real(2.0))(0, 0, 0) == 0.6);
  CHECK(remove_sf(apply_sf(y, QualityFactor::from_real(2.0)),
                  QualityFactor::from_real(2.0))(0, 0, 0) == 0.3);
}

TEST_CASE("quantize rounds half away from zero and clamps") {
  CHECK(quantize_value(1.25, 1.25) == 0);
  CHECK(quantize_value(2.5, 0.0) == 3);
  CHECK(quantize_value(-2.5, 0.0) == -3);
  CHECK(quantize_value(0.49, 0.0) == 0);
  CHECK(quantize_value(-0.5, 0.0) == -1);
  bool clamped = false;
  CHECK(quantize_value(64.4, 0.0, &clamped) == 64);
  CHECK_FALSE(clamped);
  CHECK(quantize_value(64.6, 0.0, &clamped) == 64);
  CHECK(clamped);
  CHECK(quantize_value(-1e9, 0.0, &clamped) == -64);
  CHECK(clamped);
}

TEST_CASE("quantize_residual counts clamps") {
  const Tensor y(Shape{1, 2, 2}, {100.0, 0.2, -0.7, -100.0});
  const Tensor mu(1, 2, 2, 0.0);
  const QuantizedPlane q = quantize_residual(y, mu);
  CHECK(q.symbols.values == std::vector<std::int32_t>{64, 0, -1, -64});
  CHECK(q.clamped == 2);
  CHECK_THROWS_AS(quantize_residual(y, Tensor(1, 1, 2)), ShapeError);
}

TEST_CASE("dequantize of zero symbols returns mu / sf") {
  std::mt19937_64 rng(5);
  const Tensor mu = oracle::random_tensor(rng, 2, 3, 4);
  const QualityFactor q = QualityFactor::from_real(2.0);
  const Tensor y = dequantize(SymbolPlane(mu.shape()), mu, q);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(y.values()[i] == mu.values()[i] / 2.0);
}

TEST_CASE("round trip error is bounded by half a step over sf") {
  std::mt19937_64 rng(2024);
  for (double sf : {0.5, 1.0, 2.0, 4.0}) {
    const QualityFactor q = QualityFactor::from_real(sf);
    const Tensor y = oracle::random_tensor(rng, 25, 20, 20, -20.0, 20.0);
    const Tensor mu = oracle::random_tensor(rng, 25, 20, 20, -3.0, 3.0);
    const Tensor ys = apply_sf(y, q);
    const QuantizedPlane qp = quantize_residual(ys, mu);
    const Tensor y_hat = dequantize(qp.symbols, mu, q);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double r = ys.values()[i] - mu.values()[i];
      if (std::abs(r) > 64.5) continue;
      CHECK(std::abs(y_hat.values()[i] - y.values()[i]) <= 0.5 / sf + 1e-12);
    }
    CHECK(dequantize(qp.symbols, mu, q).bitwise_equal(y_hat));
  }
}

}  // namespace
}  // namespace tinylic
