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

#ifndef TINYLIC_RANGE_CODER_HPP_
#define TINYLIC_RANGE_CODER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tinylic {

inline constexpr int kCdfPrecisionBits = 16;
inline constexpr std::uint32_t kCdfTotal = 1u << kCdfPrecisionBits;

// Cumulative frequency table at 16-bit precision: n symbols, n + 1 entries,
// first 0, last 65536, strictly increasing (every symbol has frequency >= 1).
// The constructor rejects anything else with InputError.
class CdfTable {
 public:
  explicit CdfTable(std::vector<std::uint32_t> cumulative);

  std::size_t symbol_count() const { return cdf_.size() - 1; }
  std::uint32_t start(std::size_t symbol) const { return cdf_[symbol]; }
  std::uint32_t frequency(std::size_t symbol) const {
    return cdf_[symbol + 1] - cdf_[symbol];
  }
  std::span<const std::uint32_t> cumulative() const { return cdf_; }

  // Symbol whose interval [start, start + freq) contains `target`.
  // Requires target < 65536.
  std::size_t find(std::uint32_t target) const;

  friend bool operator==(const CdfTable&, const CdfTable&) = default;

 private:
  std::vector<std::uint32_t> cdf_;
};

// Byte-oriented range encoder: 32-bit range, renormalization one byte at a
// time whenever range < 2^24, carries resolved through a 64-bit low and a
// cached byte plus a run of pending 0xFF bytes. Integer arithmetic only.
class RangeEncoder {
 public:
  // Throws InputError if `symbol` is outside the table.
  void encode(std::size_t symbol, const CdfTable& table);

  // Flushes the final four bytes of `low` and returns the stream.
  std::vector<std::uint8_t> finish() &&;

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t pending_ = 0;
  bool has_cache_ = false;
  std::vector<std::uint8_t> out_;
};

// Mirror of RangeEncoder. Reads exactly the bytes the encoder wrote; running
// out of input, an out-of-range target, or leftover bytes at finish() raise
// CorruptStreamError.
class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);

  std::size_t decode(const CdfTable& table);

  // Verifies that the whole stream has been consumed.
  void finish() const;

 private:
  std::uint8_t next_byte();

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
};

// One table per symbol.
std::vector<std::uint8_t> rc_encode(std::span<const std::uint32_t> symbols,
                                    std::span<const CdfTable> tables);
std::vector<std::uint32_t> rc_decode(std::span<const std::uint8_t> bytes,
                                     std::span<const CdfTable> tables);

}  // namespace tinylic

#endif  // TINYLIC_RANGE_CODER_HPP_
