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
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "tinylic/errors.hpp"
#include "tinylic/model_config.hpp"
#include "tinylic/transform.hpp"
#include "tinylic/weights.hpp"

namespace tinylic {
namespace {

TEST_CASE("neighbor window is clamped inward at the borders") {
  CHECK(neighborhood_window(0, 10, 5).start == 0);
  CHECK(neighborhood_window(1, 10, 5).start == 0);
  CHECK(neighborhood_window(2, 10, 5).start == 0);
  CHECK(neighborhood_window(3, 10, 5).start == 1);
  CHECK(neighborhood_window(9, 10, 5).start == 5);
  CHECK(neighborhood_window(9, 10, 5).length == 5);
  CHECK(neighborhood_window(1, 3, 5).start == 0);
  CHECK(neighborhood_window(1, 3, 5).length == 3);
  for (std::size_t n = 1; n <= 9; ++n) {
    for (std::size_t w : {1u, 3u, 5u, 7u}) {
      for (std::size_t i = 0; i < n; ++i) {
        const NeighborWindow win = neighborhood_window(i, n, w);
        const auto want = oracle::neighbors(i, n, w);
        CHECK(win.start == want.front());
        CHECK(win.length == want.size());
      }
    }
  }
}

TEST_CASE("neighborhood attention matches the direct-definition oracle") {
  std::mt19937_64 rng(101);
  for (std::size_t h = 1; h <= 4; ++h) {
    for (std::size_t w = 1; w <= 4; ++w) {
      for (std::size_t win : {1u, 3u}) {
        for (std::size_t heads : {1u, 2u}) {
          const NAParams p = oracle::random_na(rng, 4, heads, win);
          const Tensor x = oracle::random_tensor(rng, h, w, 4);
          CHECK(oracle::max_abs_diff(neighborhood_attention(x, p),
                                     oracle::neighborhood_attention(x, p)) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("neighborhood attention equals global attention on small maps") {
  std::mt19937_64 rng(103);
  for (std::size_t h = 1; h <= 3; ++h) {
    for (std::size_t w = 1; w <= 3; ++w) {
      for (std::size_t heads : {1u, 2u}) {
        const NAParams p = oracle::random_na(rng, 6, heads, 3);
        const Tensor x = oracle::random_tensor(rng, h, w, 6);
        CHECK(oracle::max_abs_diff(neighborhood_attention(x, p),
                                   oracle::neighborhood_attention(x, p, true)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("zero queries and keys give uniform attention") {
  std::mt19937_64 rng(105);
  NAParams p = oracle::random_na(rng, 4, 2, 3);
  for (Linear* l : {&p.q_proj, &p.k_proj}) {
    std::fill(l->weight.begin(), l->weight.end(), 0.0);
    std::fill(l->bias.begin(), l->bias.end(), 0.0);
  }
  std::fill(p.pos_bias.begin(), p.pos_bias.end(), 0.0);
  const Tensor x = oracle::random_tensor(rng, 5, 5, 4);
  const Tensor got = neighborhood_attention(x, p);
  for (std::size_t y = 0; y < 5; ++y) {
    for (std::size_t xx = 0; xx < 5; ++xx) {
      std::vector<double> mean(4, 0.0);
      for (std::size_t ny : oracle::neighbors(y, 5, 3)) {
        for (std::size_t nx : oracle::neighbors(xx, 5, 3)) {
          const auto v = oracle::affine(oracle::vec_at(x, ny, nx), p.v_proj);
          for (std::size_t c = 0; c < 4; ++c) mean[c] += v[c] / 9.0;
        }
      }
      const auto want = oracle::affine(mean, p.out_proj);
      for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(got(y, xx, c) - want[c]) <= 1e-12);
    }
  }
}

TEST_CASE("corner query sees the clamped block") {
  const NeighborWindow wy = neighborhood_window(0, 5, 3);
  const NeighborWindow wx = neighborhood_window(0, 5, 3);
  CHECK(wy.start == 0);
  CHECK(wy.length == 3);
  CHECK(wx.start == 0);
  CHECK(wx.length == 3);
  CHECK(oracle::neighbors(0, 5, 3) == std::vector<std::size_t>{0, 1, 2});
  CHECK(oracle::neighbors(4, 5, 3) == std::vector<std::size_t>{2, 3, 4});
}

TEST_CASE("each relative offset has its own bias entry") {
  std::mt19937_64 rng(106);
  for (std::size_t w : {1u, 3u, 5u}) {
    NAParams p = oracle::random_na(rng, 4, 2, w);
    for (std::size_t i = 0; i < p.pos_bias.size(); ++i) p.pos_bias[i] = static_cast<double>(i);
    std::set<double> seen;
    const auto r = static_cast<std::ptrdiff_t>(w) - 1;
    for (std::size_t h = 0; h < 2; ++h) {
      for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
        for (std::ptrdiff_t dx = -r; dx <= r; ++dx) seen.insert(p.bias(h, dy, dx));
      }
    }
    CHECK(seen.size() == p.pos_bias.size());
  }
}

TEST_CASE("window 1 attention reduces to the value and output projections") {
  std::mt19937_64 rng(107);
  const NAParams p = oracle::random_na(rng, 4, 2, 1);
  const Tensor x = oracle::random_tensor(rng, 3, 5, 4);
  const Tensor got = neighborhood_attention(x, p);
  for (std::size_t y = 0; y < 3; ++y) {
    for (std::size_t xx = 0; xx < 5; ++xx) {
      const auto want =
          oracle::affine(oracle::affine(oracle::vec_at(x, y, xx), p.v_proj), p.out_proj);
      for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(got(y, xx, c) - want[c]) <= 1e-12);
    }
  }
}

TEST_CASE("attention weights form a distribution over the window") {
  std::mt19937_64 rng(109);
  const NAParams p = oracle::random_na(rng, 4, 2, 3);
  const Tensor x = oracle::random_tensor(rng, 6, 5, 4);
  for (std::size_t y : {0u, 2u, 5u}) {
    for (std::size_t head : {0u, 1u}) {
      const auto a = neighborhood_attention_weights(x, p, y, 4, head);
      CHECK(a.size() == 9);
      double sum = 0.0;
      for (double v : a) {
        CHECK(v > 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("positional bias shifts attention toward the favored offset") {
  std::mt19937_64 rng(113);
  NAParams p = oracle::random_na(rng, 2, 1, 3);
  std::fill(p.pos_bias.begin(), p.pos_bias.end(), 0.0);
  const Tensor x = oracle::random_tensor(rng, 3, 3, 2);
  const auto before = neighborhood_attention_weights(x, p, 1, 1, 0);
  p.pos_bias[(0 + 2) * 5 + (1 + 2)] = 50.0;  // offset (0, +1)
  const auto after = neighborhood_attention_weights(x, p, 1, 1, 0);
  CHECK(after[5] > 0.999);
  CHECK(after[5] > before[5]);
}

TEST_CASE("attention parameter validation") {
  std::mt19937_64 rng(127);
  NAParams p = oracle::random_na(rng, 4, 3, 3);
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = oracle::random_na(rng, 4, 2, 3);
  p.window = 2;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = oracle::random_na(rng, 4, 2, 3);
  p.pos_bias.pop_back();
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = oracle::random_na(rng, 4, 2, 3);
  CHECK_THROWS_AS(neighborhood_attention(Tensor(2, 2, 3), p), ConfigError);
}

TEST_CASE("token embedding round-trips") {
  std::mt19937_64 rng(131);
  const Tensor x = oracle::random_tensor(rng, 3, 4, 5);
  const TokenMatrix t = embed_tokens(x);
  CHECK(t.rows == 12);
  CHECK(t.cols == 5);
  CHECK(t.values[(1 * 4 + 2) * 5 + 3] == x(1, 2, 3));
  CHECK(unembed_tokens(t, 3, 4).bitwise_equal(x));
  CHECK_THROWS_AS(unembed_tokens(t, 4, 4), ShapeError);
}

TEST_CASE("rnab matches the composed oracle") {
  std::mt19937_64 rng(137);
  for (int trial = 0; trial < 20; ++trial) {
    const RnabParams p = oracle::random_rnab(rng, 4, 1 + trial % 2, 3, 2);
    const Tensor x = oracle::random_tensor(rng, 1 + rng() % 5, 1 + rng() % 5, 4);
    CHECK(oracle::max_abs_diff(rnab_forward(x, p), oracle::rnab(x, p)) <= 1e-9);
  }
}

TEST_CASE("rnab with zeroed output layers is the identity") {
  std::mt19937_64 rng(139);
  RnabParams p = oracle::random_rnab(rng, 4, 2, 3, 2);
  std::fill(p.attn.out_proj.weight.begin(), p.attn.out_proj.weight.end(), 0.0);
  std::fill(p.attn.out_proj.bias.begin(), p.attn.out_proj.bias.end(), 0.0);
  std::fill(p.fc2.weight.begin(), p.fc2.weight.end(), 0.0);
  std::fill(p.fc2.bias.begin(), p.fc2.bias.end(), 0.0);
  const Tensor x = oracle::random_tensor(rng, 4, 3, 4);
  CHECK(rnab_forward(x, p).bitwise_equal(x));
}

TEST_CASE("icsa resamples by two in each direction") {
  std::mt19937_64 rng(149);
  IcsaParams down{oracle::random_kernel(rng, 3, 3, 4, 2), {}};
  down.blocks.push_back(oracle::random_rnab(rng, 4, 2, 3, 2));
  const Tensor x = oracle::random_tensor(rng, 8, 6, 3);
  const Tensor y = icsa_forward(x, down, Direction::kDown);
  CHECK(y.shape() == Shape{4, 3, 4});
  CHECK(oracle::max_abs_diff(
            y, oracle::rnab(oracle::conv2d(x, down.resample), down.blocks[0])) <= 1e-9);

  IcsaParams up{oracle::random_kernel(rng, 3, 4, 3, 2), {}};
  up.blocks.push_back(oracle::random_rnab(rng, 4, 2, 3, 2));
  const Tensor z = icsa_forward(y, up, Direction::kUp);
  CHECK(z.shape() == Shape{8, 6, 3});
  CHECK(oracle::max_abs_diff(
            z, oracle::tconv2d(oracle::rnab(y, up.blocks[0]), up.resample)) <= 1e-9);
}

TEST_CASE("icsa with no blocks is a bare resampling") {
  std::mt19937_64 rng(150);
  const IcsaParams down{oracle::random_kernel(rng, 5, 2, 3, 2), {}};
  const Tensor x = oracle::random_tensor(rng, 8, 8, 2);
  CHECK(icsa_forward(x, down, Direction::kDown).bitwise_equal(conv2d(x, down.resample)));
  const IcsaParams up{oracle::random_kernel(rng, 3, 2, 3, 2), {}};
  const Tensor y = oracle::random_tensor(rng, 4, 4, 2);
  const Tensor z = icsa_forward(y, up, Direction::kUp);
  CHECK(z.shape() == Shape{8, 8, 3});
  CHECK(z.bitwise_equal(tconv2d(y, up.resample)));
}

TEST_CASE("analysis and synthesis shapes at the default config") {
  const ModelConfig cfg;
  const WeightStore ws = init_weights(cfg, 3);
  const TransformParams tp = TransformParams::from_store(ws, cfg);
  std::mt19937_64 rng(151);
  const Tensor x = oracle::random_tensor(rng, 128, 64, 3, 0.0, 1.0);
  const Tensor y = analysis(x, tp, cfg);
  CHECK(y.shape() == Shape{8, 4, 64});
  const Tensor z = hyper_analysis(y, tp, cfg);
  CHECK(z.shape() == Shape{2, 1, 32});
  const Tensor psi = hyper_synthesis(z, tp, cfg);
  CHECK(psi.shape() == Shape{8, 4, 128});
  const Tensor xr = synthesis(y, tp, cfg);
  CHECK(xr.shape() == Shape{128, 64, 3});
  for (double v : xr.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(analysis(x, ws, cfg).bitwise_equal(y));
  CHECK(hyper_analysis(y, ws, cfg).bitwise_equal(z));
  CHECK(synthesis(y, ws, cfg).bitwise_equal(xr));
}

TEST_CASE("transform pipeline runs for every padded size") {
  const ModelConfig cfg;
  const TransformParams tp = TransformParams::from_store(init_weights(cfg, 4), cfg);
  std::mt19937_64 rng(152);
  for (std::size_t h : {64u, 128u, 192u}) {
    for (std::size_t w : {64u, 128u, 192u}) {
      const Tensor x = oracle::random_tensor(rng, h, w, 3, 0.0, 1.0);
      const Tensor y = analysis(x, tp, cfg);
      CHECK(y.shape() == Shape{h / 16, w / 16, 64});
      CHECK(hyper_analysis(y, tp, cfg).shape() == Shape{h / 64, w / 64, 32});
      CHECK(synthesis(y, tp, cfg).shape() == Shape{h, w, 3});
    }
  }
}

TEST_CASE("analysis rejects inputs off the 64 grid") {
  const ModelConfig cfg;
  const WeightStore ws = init_weights(cfg, 3);
  CHECK_THROWS_AS(analysis(Tensor(64, 65, 3), ws, cfg), InputError);
  CHECK_THROWS_AS(analysis(Tensor(64, 64, 1), ws, cfg), InputError);
  Tensor bad(64, 64, 3);
  bad(3, 3, 1) = std::nan("");
  CHECK_THROWS_AS(analysis(bad, ws, cfg), NumericError);
}

}  // namespace
}  // namespace tinylic
