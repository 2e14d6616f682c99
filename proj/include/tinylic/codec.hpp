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

#ifndef TINYLIC_CODEC_HPP_
#define TINYLIC_CODEC_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tinylic/context_model.hpp"
#include "tinylic/entropy_models.hpp"
#include "tinylic/image.hpp"
#include "tinylic/model_config.hpp"
#include "tinylic/quantizer.hpp"
#include "tinylic/tensor.hpp"
#include "tinylic/transform.hpp"
#include "tinylic/weights.hpp"

namespace tinylic {

// "TLIC" container. Integers are big-endian:
//   magic[4] version:u8 width:u32 height:u32 sf:u16(Q8.8) config_id:u8
//   z chunk (u32 length + bytes), then 10 y chunks (u32 length + bytes).
struct Bitstream {
  static constexpr std::uint8_t kVersion = 1;
  static constexpr std::size_t kFixedHeaderBytes = 16;
  static constexpr std::size_t kChunkCount = 1 + kStreamCount;

  std::uint32_t width = 0;
  std::uint32_t height = 0;
  QualityFactor sf = QualityFactor::from_q88(256);
  std::uint8_t config_id = 0;
  Stream z_chunk;
  std::vector<Stream> y_chunks;

  std::vector<std::uint8_t> serialize() const;
  // Throws FormatError on bad magic/version, zero dims or SF, or chunk
  // lengths inconsistent with the total size.
  static Bitstream parse(std::span<const std::uint8_t> bytes);

  std::size_t payload_bytes() const;
  // Fixed header plus the eleven length fields.
  std::size_t header_bytes() const {
    return kFixedHeaderBytes + 4 * kChunkCount;
  }

  friend bool operator==(const Bitstream&, const Bitstream&) = default;
};

// Normalizes to [0, 1] and replicate-pads right/bottom to multiples of 64.
Tensor pad_image(const Image& img);
// Crops the top-left width x height region and rounds to 8 bits.
Image crop_to_image(const Tensor& x, std::uint32_t width, std::uint32_t height);

struct EncodeResult {
  Bitstream bitstream;
  Image reconstruction;  // what the decoder will produce
  double estimated_bits_z = 0.0;
  double estimated_bits_y = 0.0;
  std::size_t clamped_symbols = 0;
  Shape latent_shape;
  Shape hyper_shape;
};

// Encoder/decoder bound to one configuration and weight set. Immutable; the
// prepared parameters are shared by every call.
class Codec {
 public:
  // Throws WeightLoadError if `ws` does not fit `cfg`.
  Codec(ModelConfig cfg, const WeightStore& ws);

  EncodeResult encode(const Image& img, QualityFactor sf) const;
  // Throws FormatError for a foreign config id, CorruptStreamError when the
  // entropy decoder desynchronizes.
  Image decode(const Bitstream& bs) const;

  const ModelConfig& config() const { return cfg_; }

 private:
  ModelConfig cfg_;
  TransformParams transforms_;
  McmWeights mcm_;
  std::vector<CdfTable> z_tables_;
};

EncodeResult encode_image(const Image& img, const ModelConfig& cfg,
                          const WeightStore& ws, QualityFactor sf);
Image decode_image(const Bitstream& bs, const ModelConfig& cfg,
                   const WeightStore& ws);

// Mean squared error over all samples; InputError on differing dims.
double mse(const Image& a, const Image& b);
// 10 log10(255^2 / mse); +infinity for identical images.
double psnr(const Image& a, const Image& b);
// J = rate_bits + lambda * mse * pixels.
double rd_cost(double rate_bits, double mse, double lambda, std::size_t pixels);

inline constexpr double kDefaultLambda = 0.01;

struct RdReport {
  double rate_bits = 0.0;         // estimated payload bits (z + y)
  double rate_bits_actual = 0.0;  // size of the whole file in bits
  double bpp = 0.0;
  double mse = 0.0;
  double psnr_db = 0.0;
  double lambda = 0.0;
  double j_cost = 0.0;
};

RdReport make_report(const EncodeResult& enc, const Image& original,
                     const Image& decoded, double lambda);
// One "key: value" line per field.
std::string format_report(const RdReport& r);

}  // namespace tinylic

#endif  // TINYLIC_CODEC_HPP_
