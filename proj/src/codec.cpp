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

#include "tinylic/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "tinylic/errors.hpp"
#include "tinylic/range_coder.hpp"

namespace tinylic {
namespace {

constexpr char kMagic[4] = {'T', 'L', 'I', 'C'};

std::size_t round_up(std::size_t v, std::size_t m) { return (v + m - 1) / m * m; }

void put_be(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = bytes - 1; i >= 0; --i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

class BeReader {
 public:
  explicit BeReader(std::span<const std::uint8_t> b) : bytes_(b) {}

  std::uint64_t read(int n, const char* what) {
    need(static_cast<std::size_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }
  Stream chunk(const char* what) {
    const auto len = static_cast<std::size_t>(read(4, what));
    need(len, what);
    Stream s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
             bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
    pos_ += len;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (remaining() < n) {
      throw FormatError(std::string("bitstream truncated in ") + what);
    }
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> Bitstream::serialize() const {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kVersion);
  put_be(out, width, 4);
  put_be(out, height, 4);
  put_be(out, sf.q88(), 2);
  out.push_back(config_id);
  put_be(out, z_chunk.size(), 4);
  out.insert(out.end(), z_chunk.begin(), z_chunk.end());
  for (const Stream& y : y_chunks) {
    put_be(out, y.size(), 4);
    out.insert(out.end(), y.begin(), y.end());
  }
  return out;
}

Bitstream Bitstream::parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 ||
      !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw FormatError("not a TLIC bitstream (bad magic)");
  }
  BeReader r(bytes.subspan(4));
  const auto version = static_cast<std::uint8_t>(r.read(1, "header"));
  if (version != kVersion) {
    throw FormatError("unsupported bitstream version " + std::to_string(version));
  }
  Bitstream bs;
  bs.width = static_cast<std::uint32_t>(r.read(4, "header"));
  bs.height = static_cast<std::uint32_t>(r.read(4, "header"));
  const auto raw_sf = static_cast<std::uint16_t>(r.read(2, "header"));
  bs.config_id = static_cast<std::uint8_t>(r.read(1, "header"));
  if (bs.width == 0 || bs.height == 0) {
    throw FormatError("bitstream declares an empty image");
  }
  if (raw_sf == 0) throw FormatError("bitstream declares a zero quality factor");
  bs.sf = QualityFactor::from_q88(raw_sf);
  bs.z_chunk = r.chunk("z chunk");
  for (std::size_t i = 0; i < kStreamCount; ++i) {
    bs.y_chunks.push_back(r.chunk("y chunk"));
  }
  if (r.remaining() != 0) {
    throw FormatError(std::to_string(r.remaining()) +
                      " trailing bytes after the last chunk");
  }
  return bs;
}

std::size_t Bitstream::payload_bytes() const {
  std::size_t n = z_chunk.size();
  for (const Stream& y : y_chunks) n += y.size();
  return n;
}

Tensor pad_image(const Image& img) {
  if (img.width == 0 || img.height == 0) {
    throw InputError("cannot code an image with a zero dimension");
  }
  if (img.samples.size() != std::size_t{img.width} * img.height * 3) {
    throw InputError("image sample count does not match its dimensions");
  }
  constexpr std::size_t m = ModelConfig::kHyperStride;
  const std::size_t h = round_up(img.height, m);
  const std::size_t w = round_up(img.width, m);
  Tensor x(h, w, 3);
  for (std::size_t y = 0; y < h; ++y) {
    const auto sy = static_cast<std::uint32_t>(std::min<std::size_t>(y, img.height - 1));
    for (std::size_t xx = 0; xx < w; ++xx) {
      const auto sx = static_cast<std::uint32_t>(std::min<std::size_t>(xx, img.width - 1));
      for (int c = 0; c < 3; ++c) x(y, xx, c) = img.at(sy, sx, c) / 255.0;
    }
  }
  return x;
}

Image crop_to_image(const Tensor& x, std::uint32_t width, std::uint32_t height) {
  if (x.channels() != 3 || x.height() < height || x.width() < width) {
    throw ShapeError("crop_to_image: reconstruction smaller than the image");
  }
  Image img(width, height);
  for (std::uint32_t y = 0; y < height; ++y) {
    for (std::uint32_t xx = 0; xx < width; ++xx) {
      for (int c = 0; c < 3; ++c) {
        const double v = std::clamp(x(y, xx, c), 0.0, 1.0);
        img.at(y, xx, c) = static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
    }
  }
  return img;
}

Codec::Codec(ModelConfig cfg, const WeightStore& ws) : cfg_(std::move(cfg)) {
  cfg_.validate();
  check_compatible(ws, cfg_);
  transforms_ = TransformParams::from_store(ws, cfg_);
  mcm_ = McmWeights::from_store(ws, cfg_);
  z_tables_ = factorized_tables(load_factorized(ws, cfg_));
}

EncodeResult Codec::encode(const Image& img, QualityFactor sf) const {
  const Tensor x = pad_image(img);
  const Tensor y = analysis(x, transforms_, cfg_);
  const Tensor z = hyper_analysis(y, transforms_, cfg_);

  EncodeResult out;
  out.latent_shape = y.shape();
  out.hyper_shape = z.shape();

  // Hyper latent: plain rounding, factorized per-channel model.
  Tensor z_hat(z.shape(), std::vector<double>(z.size()));
  RangeEncoder z_enc;
  for (std::size_t i = 0; i < z.size(); ++i) {
    bool clamped = false;
    const std::int32_t s = quantize_value(z.values()[i], 0.0, &clamped);
    out.clamped_symbols += clamped;
    const CdfTable& table = z_tables_[i % z.channels()];
    z_enc.encode(symbol_to_index(s), table);
    out.estimated_bits_z += symbol_bits(table, symbol_to_index(s));
    z_hat.values()[i] = s;
  }

  const Tensor psi = hyper_synthesis(z_hat, transforms_, cfg_);
  McmEncoding latent = mcm_quantize_encode(apply_sf(y, sf), psi, mcm_);
  out.clamped_symbols += latent.clamped;
  for (double b : latent.estimated_bits) out.estimated_bits_y += b;

  const Tensor x_hat = synthesis(remove_sf(latent.y_hat, sf), transforms_, cfg_);
  out.reconstruction = crop_to_image(x_hat, img.width, img.height);

  out.bitstream.width = img.width;
  out.bitstream.height = img.height;
  out.bitstream.sf = sf;
  out.bitstream.config_id = cfg_.id();
  out.bitstream.z_chunk = std::move(z_enc).finish();
  out.bitstream.y_chunks = std::move(latent.streams);
  return out;
}

Image Codec::decode(const Bitstream& bs) const {
  if (bs.config_id != cfg_.id()) {
    throw FormatError("bitstream was produced with config id " +
                      std::to_string(bs.config_id) + ", decoder has " +
                      std::to_string(cfg_.id()));
  }
  if (bs.y_chunks.size() != kStreamCount) {
    throw FormatError("bitstream must carry exactly 10 latent chunks");
  }
  const std::size_t ph = round_up(bs.height, ModelConfig::kHyperStride);
  const std::size_t pw = round_up(bs.width, ModelConfig::kHyperStride);

  Tensor z_hat(ph / ModelConfig::kHyperStride, pw / ModelConfig::kHyperStride,
               cfg_.hyper_channels);
  RangeDecoder z_dec(bs.z_chunk);
  for (std::size_t i = 0; i < z_hat.size(); ++i) {
    const auto index = static_cast<std::uint32_t>(
        z_dec.decode(z_tables_[i % cfg_.hyper_channels]));
    z_hat.values()[i] = index_to_symbol(index);
  }
  z_dec.finish();

  const Tensor psi = hyper_synthesis(z_hat, transforms_, cfg_);
  const McmDecoding latent = mcm_decode(bs.y_chunks, psi, mcm_);
  const Tensor x_hat =
      synthesis(remove_sf(latent.y_hat, bs.sf), transforms_, cfg_);
  return crop_to_image(x_hat, bs.width, bs.height);
}

EncodeResult encode_image(const Image& img, const ModelConfig& cfg,
                          const WeightStore& ws, QualityFactor sf) {
  return Codec(cfg, ws).encode(img, sf);
}

Image decode_image(const Bitstream& bs, const ModelConfig& cfg,
                   const WeightStore& ws) {
  return Codec(cfg, ws).decode(bs);
}

double mse(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height ||
      a.samples.size() != b.samples.size()) {
    throw InputError("mse: images differ in size");
  }
  if (a.samples.empty()) throw InputError("mse: empty images");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = static_cast<double>(a.samples[i]) - b.samples[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.samples.size());
}

double psnr(const Image& a, const Image& b) {
  const double e = mse(a, b);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / e);
}

double rd_cost(double rate_bits, double mse, double lambda, std::size_t pixels) {
  if (rate_bits < 0.0 || mse < 0.0 || lambda < 0.0) {
    throw InputError("rd_cost: arguments must be non-negative");
  }
  return rate_bits + lambda * mse * static_cast<double>(pixels);
}

RdReport make_report(const EncodeResult& enc, const Image& original,
                     const Image& decoded, double lambda) {
  const std::size_t pixels = std::size_t{original.width} * original.height;
  RdReport r;
  r.rate_bits = enc.estimated_bits_z + enc.estimated_bits_y;
  r.rate_bits_actual = 8.0 * static_cast<double>(enc.bitstream.serialize().size());
  r.bpp = r.rate_bits_actual / static_cast<double>(pixels);
  r.mse = mse(original, decoded);
  r.psnr_db = psnr(original, decoded);
  r.lambda = lambda;
  r.j_cost = rd_cost(r.rate_bits_actual, r.mse, lambda, pixels);
  return r;
}

std::string format_report(const RdReport& r) {
  const auto num = [](double v) {
    if (std::isinf(v)) return std::string("inf");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  return "rate_bits: " + num(r.rate_bits) + "\n" +
         "rate_bits_actual: " + num(r.rate_bits_actual) + "\n" +
         "bpp: " + num(r.bpp) + "\n" + "mse: " + num(r.mse) + "\n" +
         "psnr_db: " + num(r.psnr_db) + "\n" + "lambda: " + num(r.lambda) +
         "\n" + "j_cost: " + num(r.j_cost) + "\n";
}

}  // namespace tinylic
