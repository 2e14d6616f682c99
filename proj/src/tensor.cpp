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

#include "tinylic/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "tinylic/errors.hpp"

namespace tinylic {
namespace {

std::size_t clamp_index(std::ptrdiff_t i, std::size_t extent) {
  if (i < 0) return 0;
  return std::min(static_cast<std::size_t>(i), extent - 1);
}

std::string shape_str(const Shape& s) {
  return std::to_string(s.height) + "x" + std::to_string(s.width) + "x" +
         std::to_string(s.channels);
}

}  // namespace

Tensor::Tensor(std::size_t height, std::size_t width, std::size_t channels,
               double fill)
    : Tensor(Shape{height, width, channels},
             std::vector<double>(height * width * channels, fill)) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (shape_.height == 0 || shape_.width == 0 || shape_.channels == 0) {
    throw ShapeError("tensor dimensions must be positive, got " +
                     shape_str(shape_));
  }
  if (values_.size() != shape_.elements()) {
    throw ShapeError("tensor of shape " + shape_str(shape_) + " needs " +
                     std::to_string(shape_.elements()) + " values, got " +
                     std::to_string(values_.size()));
  }
}

bool Tensor::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

Tensor Tensor::slice_channels(std::size_t first, std::size_t count) const {
  if (count == 0 || first + count > shape_.channels) {
    throw ShapeError("channel slice [" + std::to_string(first) + ", " +
                     std::to_string(first + count) + ") out of range for " +
                     shape_str(shape_));
  }
  Tensor out(shape_.height, shape_.width, count);
  for (std::size_t p = 0; p < shape_.positions(); ++p) {
    std::copy_n(values_.begin() + p * shape_.channels + first, count,
                out.values_.begin() + p * count);
  }
  return out;
}

bool Tensor::bitwise_equal(const Tensor& other) const {
  return shape_ == other.shape_ &&
         std::memcmp(values_.data(), other.values_.data(),
                     values_.size() * sizeof(double)) == 0;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw ShapeError("concat_channels: spatial extents differ (" +
                     shape_str(a.shape()) + " vs " + shape_str(b.shape()) +
                     ")");
  }
  Tensor out(a.height(), a.width(), a.channels() + b.channels());
  for (std::size_t y = 0; y < a.height(); ++y) {
    for (std::size_t x = 0; x < a.width(); ++x) {
      auto dst = out.at(y, x);
      auto sa = a.at(y, x);
      auto sb = b.at(y, x);
      std::copy(sa.begin(), sa.end(), dst.begin());
      std::copy(sb.begin(), sb.end(), dst.begin() + sa.size());
    }
  }
  return out;
}

void require_finite(const Tensor& t, const char* where) {
  if (!t.all_finite()) {
    throw NumericError(std::string("non-finite value in ") + where);
  }
}

ConvKernel::ConvKernel(std::size_t size, std::size_t in_channels,
                       std::size_t out_channels, std::size_t stride,
                       std::vector<double> weights, std::vector<double> bias)
    : size_(size),
      in_(in_channels),
      out_(out_channels),
      stride_(stride),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {
  if (size_ % 2 == 0) {
    throw ConfigError("kernel size must be odd, got " + std::to_string(size_));
  }
  if (stride_ != 1 && stride_ != 2) {
    throw ConfigError("kernel stride must be 1 or 2, got " +
                      std::to_string(stride_));
  }
  if (in_ == 0 || out_ == 0) throw ShapeError("kernel channels must be > 0");
  if (weights_.size() != size_ * size_ * in_ * out_) {
    throw ShapeError("kernel weights: expected " +
                     std::to_string(size_ * size_ * in_ * out_) +
                     " values, got " + std::to_string(weights_.size()));
  }
  if (bias_.size() != out_) {
    throw ShapeError("kernel bias: expected " + std::to_string(out_) +
                     " values, got " + std::to_string(bias_.size()));
  }
}

ConvKernel transpose_channels(const ConvKernel& kernel) {
  const std::size_t k = kernel.size();
  const std::size_t a = kernel.in_channels();
  const std::size_t b = kernel.out_channels();
  std::vector<double> w(k * k * a * b);
  for (std::size_t ky = 0; ky < k; ++ky)
    for (std::size_t kx = 0; kx < k; ++kx)
      for (std::size_t ci = 0; ci < a; ++ci)
        for (std::size_t co = 0; co < b; ++co)
          w[((ky * k + kx) * b + co) * a + ci] = kernel.weight(ky, kx, ci, co);
  return ConvKernel(k, b, a, kernel.stride(), std::move(w),
                    std::vector<double>(a, 0.0));
}

Tensor conv2d(const Tensor& input, const ConvKernel& kernel) {
  if (input.channels() != kernel.in_channels()) {
    throw ShapeError("conv2d: input has " + std::to_string(input.channels()) +
                     " channels, kernel expects " +
                     std::to_string(kernel.in_channels()));
  }
  const std::size_t k = kernel.size();
  const std::size_t s = kernel.stride();
  const auto pad = static_cast<std::ptrdiff_t>((k - 1) / 2);
  const std::size_t cin = kernel.in_channels();
  const std::size_t cout = kernel.out_channels();
  const std::size_t out_h = (input.height() + s - 1) / s;
  const std::size_t out_w = (input.width() + s - 1) / s;
  const auto w = kernel.weights();
  const auto bias = kernel.bias();

  Tensor out(out_h, out_w, cout);
  std::vector<double> acc(cout);
  for (std::size_t oy = 0; oy < out_h; ++oy) {
    for (std::size_t ox = 0; ox < out_w; ++ox) {
      std::fill(acc.begin(), acc.end(), 0.0);
      // Every accumulator sees its terms in (ky, kx, ci) order.
      for (std::size_t ky = 0; ky < k; ++ky) {
        const std::size_t iy = clamp_index(
            static_cast<std::ptrdiff_t>(oy * s + ky) - pad, input.height());
        for (std::size_t kx = 0; kx < k; ++kx) {
          const std::size_t ix = clamp_index(
              static_cast<std::ptrdiff_t>(ox * s + kx) - pad, input.width());
          const auto src = input.at(iy, ix);
          const double* wrow = w.data() + (ky * k + kx) * cin * cout;
          for (std::size_t ci = 0; ci < cin; ++ci) {
            const double v = src[ci];
            const double* wc = wrow + ci * cout;
            for (std::size_t co = 0; co < cout; ++co) acc[co] += wc[co] * v;
          }
        }
      }
      auto dst = out.at(oy, ox);
      for (std::size_t co = 0; co < cout; ++co) dst[co] = acc[co] + bias[co];
    }
  }
  return out;
}

Tensor tconv2d(const Tensor& input, const ConvKernel& kernel) {
  if (input.channels() != kernel.in_channels()) {
    throw ShapeError("tconv2d: input has " + std::to_string(input.channels()) +
                     " channels, kernel expects " +
                     std::to_string(kernel.in_channels()));
  }
  const std::size_t k = kernel.size();
  const std::size_t s = kernel.stride();
  const auto pad = static_cast<std::ptrdiff_t>((k - 1) / 2);
  const std::size_t cin = kernel.in_channels();
  const std::size_t cout = kernel.out_channels();
  const std::size_t out_h = input.height() * s;
  const std::size_t out_w = input.width() * s;
  const auto w = kernel.weights();
  const auto bias = kernel.bias();

  // Scatter form of the adjoint: every tap that conv2d would have gathered
  // from a (clamped) position deposits back into that position.
  Tensor out(out_h, out_w, cout);
  for (std::size_t iy = 0; iy < input.height(); ++iy) {
    for (std::size_t ix = 0; ix < input.width(); ++ix) {
      const auto src = input.at(iy, ix);
      for (std::size_t ky = 0; ky < k; ++ky) {
        const std::size_t oy = clamp_index(
            static_cast<std::ptrdiff_t>(iy * s + ky) - pad, out_h);
        for (std::size_t kx = 0; kx < k; ++kx) {
          const std::size_t ox = clamp_index(
              static_cast<std::ptrdiff_t>(ix * s + kx) - pad, out_w);
          auto dst = out.at(oy, ox);
          const double* wrow = w.data() + (ky * k + kx) * cin * cout;
          for (std::size_t ci = 0; ci < cin; ++ci) {
            const double v = src[ci];
            const double* wc = wrow + ci * cout;
            for (std::size_t co = 0; co < cout; ++co) dst[co] += wc[co] * v;
          }
        }
      }
    }
  }
  for (std::size_t p = 0; p < out_h * out_w; ++p) {
    double* dst = out.values().data() + p * cout;
    for (std::size_t co = 0; co < cout; ++co) dst[co] += bias[co];
  }
  return out;
}

Tensor layer_norm(const Tensor& input, std::span<const double> gamma,
                  std::span<const double> beta, double eps) {
  const std::size_t c = input.channels();
  if (gamma.size() != c || beta.size() != c) {
    throw ShapeError("layer_norm: gamma/beta length must equal " +
                     std::to_string(c));
  }
  Tensor out(input.shape(), std::vector<double>(input.size()));
  const double inv_c = 1.0 / static_cast<double>(c);
  for (std::size_t p = 0; p < input.shape().positions(); ++p) {
    const double* src = input.values().data() + p * c;
    double* dst = out.values().data() + p * c;
    double mean = 0.0;
    for (std::size_t i = 0; i < c; ++i) mean += src[i];
    mean *= inv_c;
    double var = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      const double d = src[i] - mean;
      var += d * d;
    }
    var *= inv_c;
    const double inv_std = 1.0 / std::sqrt(var + eps);
    for (std::size_t i = 0; i < c; ++i) {
      dst[i] = (src[i] - mean) * inv_std * gamma[i] + beta[i];
    }
  }
  return out;
}

double gelu(double x) {
  return 0.5 * x * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

Tensor gelu(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.values()) v = gelu(v);
  return out;
}

void softmax_inplace(std::span<double> logits) {
  if (logits.empty()) return;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - peak);
    sum += v;
  }
  const double inv = 1.0 / sum;
  for (double& v : logits) v *= inv;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.begin(), logits.end());
  softmax_inplace(out);
  return out;
}

void Linear::validate() const {
  if (in == 0 || out == 0) throw ShapeError("linear: dimensions must be > 0");
  if (weight.size() != in * out) {
    throw ShapeError("linear: weight needs " + std::to_string(in * out) +
                     " values, got " + std::to_string(weight.size()));
  }
  if (bias.size() != out) {
    throw ShapeError("linear: bias needs " + std::to_string(out) +
                     " values, got " + std::to_string(bias.size()));
  }
}

namespace {

void linear_into(const double* x, const Linear& layer, double* y) {
  std::fill(y, y + layer.out, 0.0);
  for (std::size_t i = 0; i < layer.in; ++i) {
    const double v = x[i];
    const double* wr = layer.weight.data() + i * layer.out;
    for (std::size_t o = 0; o < layer.out; ++o) y[o] += wr[o] * v;
  }
  for (std::size_t o = 0; o < layer.out; ++o) y[o] += layer.bias[o];
}

}  // namespace

std::vector<double> linear(std::span<const double> input, const Linear& layer) {
  layer.validate();
  if (input.size() != layer.in) {
    throw ShapeError("linear: input has " + std::to_string(input.size()) +
                     " values, layer expects " + std::to_string(layer.in));
  }
  std::vector<double> out(layer.out);
  linear_into(input.data(), layer, out.data());
  return out;
}

Tensor linear(const Tensor& input, const Linear& layer) {
  layer.validate();
  if (input.channels() != layer.in) {
    throw ShapeError("linear: input has " + std::to_string(input.channels()) +
                     " channels, layer expects " + std::to_string(layer.in));
  }
  Tensor out(input.height(), input.width(), layer.out);
  for (std::size_t p = 0; p < input.shape().positions(); ++p) {
    linear_into(input.values().data() + p * layer.in, layer,
                out.values().data() + p * layer.out);
  }
  return out;
}

}  // namespace tinylic
