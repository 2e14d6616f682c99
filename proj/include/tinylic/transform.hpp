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

#ifndef TINYLIC_TRANSFORM_HPP_
#define TINYLIC_TRANSFORM_HPP_

#include <cstddef>
#include <vector>

#include "tinylic/model_config.hpp"
#include "tinylic/tensor.hpp"

namespace tinylic {

class WeightStore;

// Parameters of one multi-head neighborhood attention layer.
struct NAParams {
  std::size_t channels = 0;
  std::size_t heads = 1;
  std::size_t window = 1;  // odd
  Linear q_proj;
  Linear k_proj;
  Linear v_proj;
  Linear out_proj;
  // heads x (2w - 1) x (2w - 1) relative-position logit bias.
  std::vector<double> pos_bias;

  std::size_t head_dim() const { return channels / heads; }
  std::size_t bias_extent() const { return 2 * window - 1; }
  // Bias for a key displaced by (dy, dx) from the query, |dy|, |dx| < w.
  double bias(std::size_t head, std::ptrdiff_t dy, std::ptrdiff_t dx) const;

  // Throws ConfigError on head/window/shape inconsistencies.
  void validate() const;
};

struct RnabParams {
  LayerNormParams ln1;
  NAParams attn;
  LayerNormParams ln2;
  Linear fc1;  // C -> r * C
  Linear fc2;  // r * C -> C
};

struct IcsaParams {
  ConvKernel resample;
  std::vector<RnabParams> blocks;
};

// Rows (or columns) a query at `index` attends to: `length` consecutive
// entries starting at `start`. The window is shifted inward at the borders
// so every query sees exactly min(window, extent) neighbors.
struct NeighborWindow {
  std::size_t start;
  std::size_t length;
};
NeighborWindow neighborhood_window(std::size_t index, std::size_t extent,
                                   std::size_t window);

Tensor neighborhood_attention(const Tensor& x, const NAParams& p);

// Attention weights of query (y, x) in `head`, in row-major order over its
// neighbor window. Exposed for inspection; the forward pass uses the same
// routine.
std::vector<double> neighborhood_attention_weights(const Tensor& x,
                                                   const NAParams& p,
                                                   std::size_t y,
                                                   std::size_t x_pos,
                                                   std::size_t head);

// Flatten / unflatten between (H, W, C) maps and position-major tokens.
struct TokenMatrix {
  std::size_t rows = 0;  // H * W
  std::size_t cols = 0;  // C
  std::vector<double> values;
};
TokenMatrix embed_tokens(Tensor x);
Tensor unembed_tokens(TokenMatrix tokens, std::size_t height,
                      std::size_t width);

// u = x + NA(LN1(x)); y = u + MLP(LN2(u)).
Tensor rnab_forward(const Tensor& x, const RnabParams& p);

Tensor icsa_forward(const Tensor& x, const IcsaParams& p, Direction direction);

// Typed view of every transform parameter, assembled once from a store.
struct TransformParams {
  std::vector<IcsaParams> main_encoder;
  std::vector<IcsaParams> main_decoder;
  std::vector<IcsaParams> hyper_encoder;
  std::vector<IcsaParams> hyper_decoder;

  static TransformParams from_store(const WeightStore& ws,
                                    const ModelConfig& cfg);
};

// g_a: H x W x 3 (H, W multiples of 64) -> H/16 x W/16 x C_y.
Tensor analysis(const Tensor& x, const TransformParams& params,
                const ModelConfig& cfg);
// g_s: h x w x C_y -> 16h x 16w x 3, clamped to [0, 1].
Tensor synthesis(const Tensor& y_hat, const TransformParams& params,
                 const ModelConfig& cfg);
// h_a: h x w x C_y -> h/4 x w/4 x C_z.
Tensor hyper_analysis(const Tensor& y, const TransformParams& params,
                      const ModelConfig& cfg);
// h_s: h x w x C_z -> 4h x 4w x 2 C_y.
Tensor hyper_synthesis(const Tensor& z_hat, const TransformParams& params,
                       const ModelConfig& cfg);

Tensor analysis(const Tensor& x, const WeightStore& ws, const ModelConfig& cfg);
Tensor synthesis(const Tensor& y_hat, const WeightStore& ws,
                 const ModelConfig& cfg);
Tensor hyper_analysis(const Tensor& y, const WeightStore& ws,
                      const ModelConfig& cfg);
Tensor hyper_synthesis(const Tensor& z_hat, const WeightStore& ws,
                       const ModelConfig& cfg);

}  // namespace tinylic

#endif  // TINYLIC_TRANSFORM_HPP_
