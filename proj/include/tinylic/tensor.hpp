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

#ifndef TINYLIC_TENSOR_HPP_
#define TINYLIC_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace tinylic {

struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t positions() const { return height * width; }
  std::size_t elements() const { return height * width * channels; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

// Dense rank-3 array of doubles stored row-major as (height, width, channel).
// Every dimension is positive; a position's channel vector is contiguous,
// so the buffer doubles as the position-major token matrix.
class Tensor {
 public:
  Tensor(std::size_t height, std::size_t width, std::size_t channels,
         double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t channels() const { return shape_.channels; }
  std::size_t size() const { return values_.size(); }

  std::size_t offset(std::size_t y, std::size_t x, std::size_t c = 0) const {
    return (y * shape_.width + x) * shape_.channels + c;
  }
  double operator()(std::size_t y, std::size_t x, std::size_t c) const {
    return values_[offset(y, x, c)];
  }
  double& operator()(std::size_t y, std::size_t x, std::size_t c) {
    return values_[offset(y, x, c)];
  }

  // Channel vector at one spatial position.
  std::span<const double> at(std::size_t y, std::size_t x) const {
    return {values_.data() + offset(y, x), shape_.channels};
  }
  std::span<double> at(std::size_t y, std::size_t x) {
    return {values_.data() + offset(y, x), shape_.channels};
  }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool all_finite() const;

  // Copies channels [first, first + count) into a new tensor.
  Tensor slice_channels(std::size_t first, std::size_t count) const;

  // Exact bit-pattern equality (distinguishes +0 and -0).
  bool bitwise_equal(const Tensor& other) const;

 private:
  Shape shape_;
  std::vector<double> values_;
};

// Channel-wise concatenation of tensors sharing one spatial extent.
Tensor concat_channels(const Tensor& a, const Tensor& b);

// Throws NumericError naming `where` if any element is NaN or infinite.
void require_finite(const Tensor& t, const char* where);

// Square convolution kernel with weights laid out as (k, k, C_in, C_out).
class ConvKernel {
 public:
  ConvKernel(std::size_t size, std::size_t in_channels,
             std::size_t out_channels, std::size_t stride,
             std::vector<double> weights, std::vector<double> bias);

  std::size_t size() const { return size_; }
  std::size_t in_channels() const { return in_; }
  std::size_t out_channels() const { return out_; }
  std::size_t stride() const { return stride_; }

  double weight(std::size_t ky, std::size_t kx, std::size_t ci,
                std::size_t co) const {
    return weights_[((ky * size_ + kx) * in_ + ci) * out_ + co];
  }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> bias() const { return bias_; }

 private:
  std::size_t size_;
  std::size_t in_;
  std::size_t out_;
  std::size_t stride_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

// Swaps the channel roles of a kernel: (k, k, A, B) -> (k, k, B, A). The
// transposed convolution with the swapped kernel is the adjoint of conv2d.
ConvKernel transpose_channels(const ConvKernel& kernel);

// Strided convolution with replicate padding of (k - 1) / 2 on each border.
// Output extent is ceil(H / s) x ceil(W / s).
Tensor conv2d(const Tensor& input, const ConvKernel& kernel);

// Transposed convolution: the adjoint of conv2d's linear map plus bias.
// Output extent is (H * s) x (W * s).
Tensor tconv2d(const Tensor& input, const ConvKernel& kernel);

struct LayerNormParams {
  std::vector<double> gamma;
  std::vector<double> beta;
};

inline constexpr double kLayerNormEps = 1e-5;

// Normalizes the channel vector at every position, then applies gamma/beta.
Tensor layer_norm(const Tensor& input, std::span<const double> gamma,
                  std::span<const double> beta, double eps = kLayerNormEps);
inline Tensor layer_norm(const Tensor& input, const LayerNormParams& p,
                         double eps = kLayerNormEps) {
  return layer_norm(input, p.gamma, p.beta, eps);
}

// Exact GELU, x * Phi(x).
double gelu(double x);
Tensor gelu(const Tensor& input);

std::vector<double> softmax(std::span<const double> logits);
void softmax_inplace(std::span<double> logits);

// Affine map with weights stored (in, out) row-major.
struct Linear {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  void validate() const;
};

std::vector<double> linear(std::span<const double> input, const Linear& layer);
// Applies `layer` to the channel vector of every position.
Tensor linear(const Tensor& input, const Linear& layer);

}  // namespace tinylic

#endif  // TINYLIC_TENSOR_HPP_
