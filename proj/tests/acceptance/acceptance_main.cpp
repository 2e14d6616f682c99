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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. `--digest` prints closed-loop digests and is used
// by the determinism check to compare independent processes.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tinylic/codec.hpp"
#include "tinylic/context_model.hpp"
#include "tinylic/entropy_models.hpp"
#include "tinylic/errors.hpp"
#include "tinylic/hashing.hpp"
#include "tinylic/quantizer.hpp"
#include "tinylic/range_coder.hpp"
#include "tinylic/weights.hpp"

namespace tinylic {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const ModelConfig& config() {
  static const ModelConfig cfg;
  return cfg;
}

const WeightStore& weights() {
  static const WeightStore ws = init_weights(config(), 2026);
  return ws;
}

const Codec& codec() {
  static const Codec c(config(), weights());
  return c;
}

// ---------------------------------------------------------------------------

CdfTable adversarial_table(std::mt19937_64& rng, int kind) {
  const std::size_t n = 2 + rng() % 255;
  std::vector<std::uint32_t> f(n, 1);
  std::uint32_t left = kCdfTotal - static_cast<std::uint32_t>(n);
  switch (kind) {
    case 0:  // single dominant bin
      f[rng() % n] += left;
      break;
    case 1:  // two heavy bins, everything else at the minimum
      f[0] += left / 2;
      f[n - 1] += left - left / 2;
      break;
    case 2: {  // random partition
      std::vector<std::uint32_t> cuts{0, left};
      for (std::size_t i = 0; i + 1 < n; ++i) {
        cuts.push_back(static_cast<std::uint32_t>(rng() % (left + 1)));
      }
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t i = 0; i < n; ++i) f[i] += cuts[i + 1] - cuts[i];
      break;
    }
    default: {  // quantized gaussian
      std::vector<double> pmf = gaussian_pmf(0.04 + (rng() % 4000) / 100.0);
      return build_cdf(pmf);
    }
  }
  std::vector<std::uint32_t> c{0};
  for (std::uint32_t v : f) c.push_back(c.back() + v);
  return CdfTable(std::move(c));
}

Outcome entropy_losslessness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  int failures = 0;
  std::size_t symbols = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t len = rng() % 1500;
    std::vector<CdfTable> tables;
    std::vector<std::uint32_t> syms;
    for (std::size_t i = 0; i < len; ++i) {
      tables.push_back(adversarial_table(rng, static_cast<int>((trial + i) % 4)));
      const CdfTable& t = tables.back();
      std::uint32_t s = static_cast<std::uint32_t>(rng() % t.symbol_count());
      if (rng() % 3 == 0) {  // bias toward minimum-frequency symbols
        for (std::uint32_t k = 0; k < t.symbol_count(); ++k) {
          if (t.frequency(k) == 1 && rng() % 2) {
            s = k;
            break;
          }
        }
      }
      syms.push_back(s);
    }
    symbols += len;
    try {
      if (rc_decode(rc_encode(syms, tables), tables) != syms) ++failures;
    } catch (const Error&) {
      ++failures;
    }
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 60.0,
          fmt("1000 trials, %zu symbols, %d mismatches, %.2f s (limit 60 s)",
              symbols, failures, secs)};
}

// ---------------------------------------------------------------------------

Outcome mcm_round_trip() {
  const auto t0 = Clock::now();
  const McmWeights mw = McmWeights::from_store(weights(), config());
  std::mt19937_64 rng(2);
  int symbol_failures = 0;
  int state_failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor psi = fixture::random_psi(rng, 8, 8, 64);
    const SymbolPlane sym = fixture::random_symbols(rng, Shape{8, 8, 64});
    std::vector<ContextState> enc_states, dec_states;
    try {
      const auto streams = mcm_encode(sym, psi, mw, [&](std::size_t, const ContextState& s) {
        enc_states.push_back(s);
      });
      const McmDecoding dec = mcm_decode(streams, psi, mw, [&](std::size_t, const ContextState& s) {
        dec_states.push_back(s);
      });
      if (dec.symbols != sym) ++symbol_failures;
    } catch (const Error&) {
      ++symbol_failures;
    }
    bool states_ok = enc_states.size() == kStreamCount && dec_states.size() == kStreamCount;
    for (std::size_t i = 0; states_ok && i < kStreamCount; ++i) {
      states_ok = enc_states[i].bitwise_equal(dec_states[i]);
    }
    state_failures += !states_ok;
  }
  const double secs = seconds_since(t0);
  return {symbol_failures == 0 && state_failures == 0 && secs < 120.0,
          fmt("50 latents 8x8x64, %d symbol mismatches, %d state mismatches, %.2f s (limit 120 s)",
              symbol_failures, state_failures, secs)};
}

// ---------------------------------------------------------------------------

Outcome causality() {
  const McmWeights mw = McmWeights::from_store(weights(), config());
  std::mt19937_64 rng(3);
  int stream_violations = 0;
  int probe_violations = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor psi = fixture::random_psi(rng, 8, 8, 64);
    const SymbolPlane sym = fixture::random_symbols(rng, Shape{8, 8, 64});
    stream_violations += fixture::causality_violation(sym, psi, mw, rng) != kStreamCount;
    probe_violations += !fixture::entropy_params_ignore_future(sym, psi, mw, rng);
  }
  return {stream_violations == 0 && probe_violations == 0,
          fmt("10 trials x 10 phases, %d stream changes, %d parameter changes",
              stream_violations, probe_violations)};
}

// ---------------------------------------------------------------------------

Outcome rate_match() {
  int failures = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Image img = fixture::random_image(400 + seed, 64, 64);
    const EncodeResult enc = codec().encode(img, QualityFactor::from_real(1.0));
    const double estimate = enc.estimated_bits_z + enc.estimated_bits_y;
    const double actual = 8.0 * static_cast<double>(enc.bitstream.payload_bytes());
    const double allowed = 0.02 * estimate + 512.0;
    worst = std::max(worst, std::abs(actual - estimate) / allowed);
    failures += std::abs(actual - estimate) > allowed;
  }
  return {failures == 0,
          fmt("20 images 64x64, %d outside 2%% + 512 bits, worst gap %.3f of allowance",
              failures, worst)};
}

// ---------------------------------------------------------------------------

Outcome na_oracle() {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  int cases = 0;
  for (std::size_t h = 1; h <= 4; ++h) {
    for (std::size_t w = 1; w <= 4; ++w) {
      for (std::size_t win : {1u, 3u}) {
        for (std::size_t heads : {1u, 2u}) {
          const NAParams p = oracle::random_na(rng, 4, heads, win);
          const Tensor x = oracle::random_tensor(rng, h, w, 4);
          const Tensor got = neighborhood_attention(x, p);
          worst = std::max(worst, oracle::max_abs_diff(got, oracle::neighborhood_attention(x, p)));
          ++cases;
          if (h <= win && w <= win) {
            worst = std::max(worst,
                             oracle::max_abs_diff(got, oracle::neighborhood_attention(x, p, true)));
            ++cases;
          }
        }
      }
    }
  }
  return {worst <= 1e-6, fmt("%d comparisons, max |diff| %.3g (tol 1e-6)", cases, worst)};
}

// ---------------------------------------------------------------------------

Outcome kernel_oracles() {
  std::mt19937_64 rng(6);
  double conv = 0.0, tconv = 0.0, ln = 0.0, sm = 0.0, ge = 0.0, adj = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = std::array<std::size_t, 3>{1, 3, 5}[trial % 3];
    const std::size_t s = 1 + trial % 2;
    {
      const Tensor x = oracle::random_tensor(rng, 1 + rng() % 9, 1 + rng() % 9, 1 + rng() % 4);
      const ConvKernel kern = oracle::random_kernel(rng, k, x.channels(), 1 + rng() % 4, s);
      conv = std::max(conv, oracle::max_abs_diff(conv2d(x, kern), oracle::conv2d(x, kern)));
    }
    {
      const Tensor y = oracle::random_tensor(rng, 1 + rng() % 4, 1 + rng() % 4, 1 + rng() % 3);
      const ConvKernel kern = oracle::random_kernel(rng, k, y.channels(), 1 + rng() % 3, s);
      tconv = std::max(tconv, oracle::max_abs_diff(tconv2d(y, kern), oracle::tconv2d(y, kern)));
    }
    {
      const std::size_t hy = 1 + rng() % 5, wy = 1 + rng() % 5;
      const std::size_t ci = 1 + rng() % 3, co = 1 + rng() % 3;
      const Tensor x = oracle::random_tensor(rng, hy * s, wy * s, ci);
      const Tensor y = oracle::random_tensor(rng, hy, wy, co);
      const ConvKernel kern = oracle::random_kernel(rng, k, ci, co, s, false);
      const Tensor ax = conv2d(x, kern);
      const Tensor aty = tconv2d(y, transpose_channels(kern));
      long double lhs = 0.0L, rhs = 0.0L;
      for (std::size_t i = 0; i < ax.size(); ++i) lhs += static_cast<long double>(ax.values()[i]) * y.values()[i];
      for (std::size_t i = 0; i < x.size(); ++i) rhs += static_cast<long double>(x.values()[i]) * aty.values()[i];
      adj = std::max(adj, static_cast<double>(std::abs(lhs - rhs)));
    }
    {
      const std::size_t c = 1 + rng() % 16;
      const Tensor x = oracle::random_tensor(rng, 1 + rng() % 4, 1 + rng() % 4, c, -10.0, 10.0);
      const auto g = oracle::random_vector(rng, c, 0.1, 2.0);
      const auto b = oracle::random_vector(rng, c);
      ln = std::max(ln, oracle::max_abs_diff(layer_norm(x, g, b), oracle::layer_norm(x, g, b)));
    }
    {
      const auto z = oracle::random_vector(rng, 1 + rng() % 30, -30.0, 30.0);
      const auto got = softmax(z);
      const auto want = oracle::softmax(z);
      for (std::size_t i = 0; i < z.size(); ++i) sm = std::max(sm, std::abs(got[i] - want[i]));
    }
    {
      const double x = oracle::random_vector(rng, 1, -10.0, 10.0)[0];
      ge = std::max(ge, std::abs(gelu(x) - oracle::gelu(x)));
    }
  }
  const bool pass = conv <= 1e-12 && tconv <= 1e-9 && adj <= 1e-9 && ln <= 1e-9 &&
                    sm <= 1e-12 && ge <= 1e-12;
  return {pass, fmt("100 cases each: conv %.2g (1e-12), tconv %.2g (1e-9), adjoint %.2g (1e-9), "
                    "layer_norm %.2g (1e-9), softmax %.2g (1e-12), gelu %.2g (1e-12)",
                    conv, tconv, adj, ln, sm, ge)};
}

// ---------------------------------------------------------------------------

Outcome shape_pipeline() {
  struct Case {
    std::uint32_t w, h;
  };
  const Case cases[] = {{64, 64}, {128, 64}, {192, 192}, {1, 1}, {65, 64}};
  int failures = 0;
  std::string notes;
  for (const Case c : cases) {
    const Image img = fixture::random_image(c.w * 1000 + c.h, c.w, c.h);
    const std::size_t ph = (c.h + 63) / 64 * 64;
    const std::size_t pw = (c.w + 63) / 64 * 64;
    const EncodeResult enc = codec().encode(img, QualityFactor::from_real(1.0));
    const Image dec = codec().decode(Bitstream::parse(enc.bitstream.serialize()));
    const bool ok = enc.latent_shape == Shape{ph / 16, pw / 16, 64} &&
                    enc.hyper_shape == Shape{ph / 64, pw / 64, 32} &&
                    dec.width == c.w && dec.height == c.h;
    failures += !ok;
    notes += fmt(" %ux%u->y%zux%zu,z%zux%zu", c.w, c.h, enc.latent_shape.width,
                 enc.latent_shape.height, enc.hyper_shape.width, enc.hyper_shape.height);
  }
  return {failures == 0, fmt("%d failures;", failures) + notes};
}

// ---------------------------------------------------------------------------

struct LoopDigest {
  bool closed = true;
  std::vector<std::uint64_t> digests;
};

std::uint64_t digest(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::string s(a.begin(), a.end());
  s.append(b.begin(), b.end());
  return fnv1a64(s);
}

LoopDigest closed_loop_digests() {
  LoopDigest out;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::uint32_t w = 64 + static_cast<std::uint32_t>(seed % 3) * 17;
    const Image img = fixture::random_image(800 + seed, w, 64);
    const EncodeResult enc = codec().encode(img, QualityFactor::from_real(1.0 + 0.25 * (seed % 4)));
    const auto bytes = enc.bitstream.serialize();
    const Image dec = codec().decode(Bitstream::parse(bytes));
    out.closed = out.closed && dec == enc.reconstruction;
    out.digests.push_back(digest(bytes, dec.samples));
  }
  return out;
}

std::string digest_text(const LoopDigest& d) {
  std::string s = d.closed ? "closed\n" : "open\n";
  for (std::uint64_t v : d.digests) s += fmt("%016llx\n", static_cast<unsigned long long>(v));
  return s;
}

std::string run_child(const std::string& exe) {
  std::string out;
  FILE* pipe = popen(("'" + exe + "' --digest").c_str(), "r");
  if (pipe == nullptr) return out;
  char buf[256];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) out += buf;
  if (pclose(pipe) != 0) out += "child failed\n";
  return out;
}

Outcome closed_loop(const std::string& exe) {
  const std::string local = digest_text(closed_loop_digests());
  const std::string a = run_child(exe);
  const std::string b = run_child(exe);
  const bool closed = local.rfind("closed\n", 0) == 0;
  return {closed && a == local && b == local,
          fmt("20 images, decoder==encoder reconstruction: %s, child runs identical: %s/%s",
              closed ? "yes" : "no", a == local ? "yes" : "no", b == local ? "yes" : "no")};
}

// ---------------------------------------------------------------------------

Outcome quantizer_bound() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> yv(-15.0, 15.0), mv(-5.0, 5.0);
  int violations = 0;
  std::size_t checked = 0, clamped = 0;
  double worst = 0.0;
  for (double sf : {0.5, 1.0, 2.0, 4.0}) {
    const QualityFactor q = QualityFactor::from_real(sf);
    const Tensor y = [&] {
      Tensor t(100, 100, 1);
      for (double& v : t.values()) v = yv(rng);
      return t;
    }();
    Tensor mu(100, 100, 1);
    for (double& v : mu.values()) v = mv(rng);
    const Tensor ys = apply_sf(y, q);
    const QuantizedPlane qp = quantize_residual(ys, mu);
    const Tensor y_hat = dequantize(qp.symbols, mu, q);
    for (std::size_t i = 0; i < y.size(); ++i) {
      bool was_clamped = false;
      (void)quantize_value(ys.values()[i], mu.values()[i], &was_clamped);
      if (was_clamped) {
        ++clamped;
        continue;
      }
      ++checked;
      const double err = std::abs(y_hat.values()[i] - y.values()[i]) * sf;
      worst = std::max(worst, err);
      violations += err > 0.5 + 1e-12;
    }
  }
  return {violations == 0,
          fmt("sf {0.5,1,2,4} x 10^4 samples, %zu unclamped checked, %zu clamped skipped, "
              "max |err|*sf %.6f (bound 0.5)", checked, clamped, worst)};
}

// ---------------------------------------------------------------------------

Outcome sf_trend() {
  const double sfs[] = {0.5, 1.0, 2.0};
  double mean[3] = {0, 0, 0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Image img = fixture::random_image(1200 + seed, 64, 64);
    for (int i = 0; i < 3; ++i) {
      const EncodeResult enc = codec().encode(img, QualityFactor::from_real(sfs[i]));
      mean[i] += 8.0 * enc.bitstream.serialize().size() / (64.0 * 64.0) / 20.0;
    }
  }
  return {mean[0] <= mean[1] && mean[1] <= mean[2],
          fmt("mean bpp over 20 images: sf 0.5 -> %.4f, sf 1 -> %.4f, sf 2 -> %.4f",
              mean[0], mean[1], mean[2])};
}

// ---------------------------------------------------------------------------

Outcome throughput() {
  const Image img = fixture::random_image(77, 256, 256);
  const auto t0 = Clock::now();
  const EncodeResult enc = codec().encode(img, QualityFactor::from_real(1.0));
  const Image dec = codec().decode(enc.bitstream);
  const double secs = seconds_since(t0);
  return {secs < 30.0 && dec == enc.reconstruction,
          fmt("256x256 encode+decode %.2f s (limit 30 s), %zu bytes", secs,
              enc.bitstream.serialize().size())};
}

}  // namespace
}  // namespace tinylic

int main(int argc, char** argv) {
  using namespace tinylic;
  const std::string self = argc > 0 ? argv[0] : "";
  if (argc > 1 && std::string(argv[1]) == "--digest") {
    std::fputs(digest_text(closed_loop_digests()).c_str(), stdout);
    return 0;
  }

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"1 entropy losslessness", entropy_losslessness},
      {"2 mcm round trip", mcm_round_trip},
      {"3 causality", causality},
      {"4 rate match", rate_match},
      {"5 neighborhood attention oracle", na_oracle},
      {"6 kernel oracles", kernel_oracles},
      {"7 shape pipeline", shape_pipeline},
      {"8 closed loop determinism", [&] { return closed_loop(self); }},
      {"9 quantizer bound", quantizer_bound},
      {"10 sf rate trend", sf_trend},
      {"11 throughput smoke", throughput},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] criterion %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
