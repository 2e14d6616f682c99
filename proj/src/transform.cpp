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

#include "tinylic/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tinylic/errors.hpp"
#include "tinylic/weights.hpp"

namespace tinylic {
namespace {

void add_inplace(Tensor& dst, const Tensor& src) {
  auto d = dst.values();
  auto s = src.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

// Fills `weights` with the normalized attention of query (y, x) in `head`
// over the window rows [wy.start, +len) x cols [wx.start, +len).
void attention_weights_into(const Tensor& q, const Tensor& k,
                            const NAParams& p, std::size_t y, std::size_t x,
                            std::size_t head, NeighborWindow wy,
                            NeighborWindow wx, std::vector<double>& weights) {
  const std::size_t d = p.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  const double* qv = q.at(y, x).data() + head * d;
  weights.resize(wy.length * wx.length);
  std::size_t n = 0;
  for (std::size_t ny = wy.start; ny < wy.start + wy.length; ++ny) {
    for (std::size_t nx = wx.start; nx < wx.start + wx.length; ++nx) {
      const double* kv = k.at(ny, nx).data() + head * d;
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += qv[i] * kv[i];
      weights[n++] =
          dot * scale +
          p.bias(head, static_cast<std::ptrdiff_t>(ny) -
                           static_cast<std::ptrdiff_t>(y),
                 static_cast<std::ptrdiff_t>(nx) -
                     static_cast<std::ptrdiff_t>(x));
    }
  }
  softmax_inplace(weights);
}

void check_input(const Tensor& x, const NAParams& p) {
  p.validate();
  if (x.channels() != p.channels) {
    throw ConfigError("neighborhood attention: input has " +
                      std::to_string(x.channels()) +
                      " channels, layer expects " +
                      std::to_string(p.channels));
  }
}

std::vector<double> copy_values(const WeightStore& ws, const std::string& path) {
  return ws.at(path).values;
}

Linear load_linear(const WeightStore& ws, const std::string& prefix,
                   std::size_t in, std::size_t out) {
  Linear l{in, out, copy_values(ws, prefix + ".weight"),
           copy_values(ws, prefix + ".bias")};
  l.validate();
  return l;
}

LayerNormParams load_ln(const WeightStore& ws, const std::string& prefix) {
  return {copy_values(ws, prefix + ".gamma"), copy_values(ws, prefix + ".beta")};
}

RnabParams load_rnab(const WeightStore& ws, const std::string& prefix,
                     std::size_t c, const ModelConfig& cfg) {
  RnabParams p;
  p.ln1 = load_ln(ws, prefix + ".ln1");
  p.ln2 = load_ln(ws, prefix + ".ln2");
  p.attn.channels = c;
  p.attn.heads = cfg.heads;
  p.attn.window = cfg.window;
  p.attn.q_proj = load_linear(ws, prefix + ".na.q_proj", c, c);
  p.attn.k_proj = load_linear(ws, prefix + ".na.k_proj", c, c);
  p.attn.v_proj = load_linear(ws, prefix + ".na.v_proj", c, c);
  p.attn.out_proj = load_linear(ws, prefix + ".na.out_proj", c, c);
  p.attn.pos_bias = copy_values(ws, prefix + ".na.pos_bias");
  p.attn.validate();
  p.fc1 = load_linear(ws, prefix + ".mlp.fc1", c, cfg.mlp_ratio * c);
  p.fc2 = load_linear(ws, prefix + ".mlp.fc2", cfg.mlp_ratio * c, c);
  return p;
}

std::vector<IcsaParams> load_network(const WeightStore& ws,
                                     const ModelConfig& cfg, Network net) {
  std::vector<IcsaParams> stages;
  for (const StageLayout& s : stage_layouts(cfg, net)) {
    ConvKernel resample(s.kernel, s.in_channels, s.out_channels, 2,
                        copy_values(ws, s.prefix + ".resample.weight"),
                        copy_values(ws, s.prefix + ".resample.bias"));
    IcsaParams unit{std::move(resample), {}};
    for (std::size_t b = 1; b <= s.depth; ++b) {
      unit.blocks.push_back(load_rnab(ws, s.prefix + ".rnab" + std::to_string(b),
                                      s.block_channels(), cfg));
    }
    stages.push_back(std::move(unit));
  }
  return stages;
}

Tensor run_network(Tensor x, const std::vector<IcsaParams>& stages,
                   Direction direction, const char* name) {
  require_finite(x, name);
  for (const IcsaParams& unit : stages) x = icsa_forward(x, unit, direction);
  require_finite(x, name);
  return x;
}

}  // namespace

double NAParams::bias(std::size_t head, std::ptrdiff_t dy,
                      std::ptrdiff_t dx) const {
  const auto r = static_cast<std::ptrdiff_t>(window) - 1;
  const std::size_t e = bias_extent();
  const auto row = static_cast<std::size_t>(dy + r);
  const auto col = static_cast<std::size_t>(dx + r);
  return pos_bias[(head * e + row) * e + col];
}

void NAParams::validate() const {
  if (heads == 0 || channels == 0 || channels % heads != 0) {
    throw ConfigError("neighborhood attention: " + std::to_string(channels) +
                      " channels not divisible into " + std::to_string(heads) +
                      " heads");
  }
  if (window % 2 == 0) {
    throw ConfigError("neighborhood attention: window must be odd, got " +
                      std::to_string(window));
  }
  for (const Linear* l : {&q_proj, &k_proj, &v_proj, &out_proj}) {
    l->validate();
    if (l->in != channels || l->out != channels) {
      throw ConfigError("neighborhood attention: projections must be " +
                        std::to_string(channels) + " -> " +
                        std::to_string(channels));
    }
  }
  if (pos_bias.size() != heads * bias_extent() * bias_extent()) {
    throw ConfigError("neighborhood attention: positional bias table needs " +
                      std::to_string(heads * bias_extent() * bias_extent()) +
                      " entries, got " + std::to_string(pos_bias.size()));
  }
}

NeighborWindow neighborhood_window(std::size_t index, std::size_t extent,
                                   std::size_t window) {
  const std::size_t length = std::min(window, extent);
  const std::size_t radius = window / 2;
  const std::size_t start =
      std::min(index > radius ? index - radius : 0, extent - length);
  return {start, length};
}

Tensor neighborhood_attention(const Tensor& x, const NAParams& p) {
  check_input(x, p);
  const Tensor q = linear(x, p.q_proj);
  const Tensor k = linear(x, p.k_proj);
  const Tensor v = linear(x, p.v_proj);
  const std::size_t d = p.head_dim();

  Tensor mixed(x.height(), x.width(), x.channels());
  std::vector<double> weights;
  for (std::size_t y = 0; y < x.height(); ++y) {
    const NeighborWindow wy = neighborhood_window(y, x.height(), p.window);
    for (std::size_t xx = 0; xx < x.width(); ++xx) {
      const NeighborWindow wx = neighborhood_window(xx, x.width(), p.window);
      auto dst = mixed.at(y, xx);
      for (std::size_t h = 0; h < p.heads; ++h) {
        attention_weights_into(q, k, p, y, xx, h, wy, wx, weights);
        double* out = dst.data() + h * d;
        std::size_t n = 0;
        for (std::size_t ny = wy.start; ny < wy.start + wy.length; ++ny) {
          for (std::size_t nx = wx.start; nx < wx.start + wx.length; ++nx) {
            const double a = weights[n++];
            const double* vv = v.at(ny, nx).data() + h * d;
            for (std::size_t i = 0; i < d; ++i) out[i] += a * vv[i];
          }
        }
      }
    }
  }
  return linear(mixed, p.out_proj);
}

std::vector<double> neighborhood_attention_weights(const Tensor& x,
                                                   const NAParams& p,
                                                   std::size_t y,
                                                   std::size_t x_pos,
                                                   std::size_t head) {
  check_input(x, p);
  if (y >= x.height() || x_pos >= x.width() || head >= p.heads) {
    throw InputError("neighborhood_attention_weights: query out of range");
  }
  const Tensor q = linear(x, p.q_proj);
  const Tensor k = linear(x, p.k_proj);
  std::vector<double> weights;
  attention_weights_into(q, k, p, y, x_pos, head,
                         neighborhood_window(y, x.height(), p.window),
                         neighborhood_window(x_pos, x.width(), p.window),
                         weights);
  return weights;
}

TokenMatrix embed_tokens(Tensor x) {
  TokenMatrix t;
  t.rows = x.shape().positions();
  t.cols = x.channels();
  auto v = x.values();
  t.values.assign(v.begin(), v.end());
  return t;
}

Tensor unembed_tokens(TokenMatrix tokens, std::size_t height,
                      std::size_t width) {
  if (tokens.rows != height * width) {
    throw ShapeError("unembed_tokens: " + std::to_string(tokens.rows) +
                     " tokens cannot fill " + std::to_string(height) + "x" +
                     std::to_string(width));
  }
  return Tensor(Shape{height, width, tokens.cols}, std::move(tokens.values));
}

Tensor rnab_forward(const Tensor& x, const RnabParams& p) {
  Tensor u = x;
  add_inplace(u, neighborhood_attention(layer_norm(x, p.ln1), p.attn));
  Tensor y = u;
  add_inplace(y, linear(gelu(linear(layer_norm(u, p.ln2), p.fc1)), p.fc2));
  return y;
}

Tensor icsa_forward(const Tensor& x, const IcsaParams& p, Direction direction) {
  if (direction == Direction::kDown) {
    Tensor h = conv2d(x, p.resample);
    for (const RnabParams& b : p.blocks) h = rnab_forward(h, b);
    return h;
  }
  Tensor h = x;
  for (const RnabParams& b : p.blocks) h = rnab_forward(h, b);
  return tconv2d(h, p.resample);
}

TransformParams TransformParams::from_store(const WeightStore& ws,
                                            const ModelConfig& cfg) {
  cfg.validate();
  return {load_network(ws, cfg, Network::kMainEncoder),
          load_network(ws, cfg, Network::kMainDecoder),
          load_network(ws, cfg, Network::kHyperEncoder),
          load_network(ws, cfg, Network::kHyperDecoder)};
}

Tensor analysis(const Tensor& x, const TransformParams& params,
                const ModelConfig& cfg) {
  constexpr std::size_t m = ModelConfig::kHyperStride;
  if (x.channels() != ModelConfig::kImageChannels || x.height() % m != 0 ||
      x.width() % m != 0) {
    throw InputError("analysis: input must be HxWx3 with H, W multiples of " +
                     std::to_string(m) + ", got " + std::to_string(x.height()) +
                     "x" + std::to_string(x.width()) + "x" +
                     std::to_string(x.channels()));
  }
  (void)cfg;
  return run_network(x, params.main_encoder, Direction::kDown, "analysis");
}

Tensor synthesis(const Tensor& y_hat, const TransformParams& params,
                 const ModelConfig& cfg) {
  if (y_hat.channels() != cfg.latent_channels) {
    throw ShapeError("synthesis: latent has " +
                     std::to_string(y_hat.channels()) + " channels, expected " +
                     std::to_string(cfg.latent_channels));
  }
  Tensor x = run_network(y_hat, params.main_decoder, Direction::kUp,
                         "synthesis");
  for (double& v : x.values()) v = std::clamp(v, 0.0, 1.0);
  return x;
}

Tensor hyper_analysis(const Tensor& y, const TransformParams& params,
                      const ModelConfig& cfg) {
  constexpr std::size_t m = ModelConfig::kHyperStride /
                            ModelConfig::kLatentStride;
  if (y.channels() != cfg.latent_channels || y.height() % m != 0 ||
      y.width() % m != 0) {
    throw ShapeError("hyper_analysis: latent must be hxwx" +
                     std::to_string(cfg.latent_channels) +
                     " with h, w multiples of " + std::to_string(m));
  }
  return run_network(y, params.hyper_encoder, Direction::kDown,
                     "hyper_analysis");
}

Tensor hyper_synthesis(const Tensor& z_hat, const TransformParams& params,
                       const ModelConfig& cfg) {
  if (z_hat.channels() != cfg.hyper_channels) {
    throw ShapeError("hyper_synthesis: hyper latent has " +
                     std::to_string(z_hat.channels()) +
                     " channels, expected " +
                     std::to_string(cfg.hyper_channels));
  }
  return run_network(z_hat, params.hyper_decoder, Direction::kUp,
                     "hyper_synthesis");
}

Tensor analysis(const Tensor& x, const WeightStore& ws,
                const ModelConfig& cfg) {
  return analysis(x, TransformParams::from_store(ws, cfg), cfg);
}

Tensor synthesis(const Tensor& y_hat, const WeightStore& ws,
                 const ModelConfig& cfg) {
  return synthesis(y_hat, TransformParams::from_store(ws, cfg), cfg);
}

Tensor hyper_analysis(const Tensor& y, const WeightStore& ws,
                      const ModelConfig& cfg) {
  return hyper_analysis(y, TransformParams::from_store(ws, cfg), cfg);
}

Tensor hyper_synthesis(const Tensor& z_hat, const WeightStore& ws,
                       const ModelConfig& cfg) {
  return hyper_synthesis(z_hat, TransformParams::from_store(ws, cfg), cfg);
}

}  // namespace tinylic
