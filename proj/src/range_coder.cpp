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

#include "tinylic/range_coder.hpp"

#include <algorithm>
#include <string>

#include "tinylic/errors.hpp"

namespace tinylic {
namespace {

constexpr std::uint32_t kTop = 1u << 24;

}  // namespace

CdfTable::CdfTable(std::vector<std::uint32_t> cumulative)
    : cdf_(std::move(cumulative)) {
  if (cdf_.size() < 2) throw InputError("cdf table needs at least one symbol");
  if (cdf_.front() != 0 || cdf_.back() != kCdfTotal) {
    throw InputError("cdf table must run from 0 to 65536");
  }
  for (std::size_t i = 1; i < cdf_.size(); ++i) {
    if (cdf_[i] <= cdf_[i - 1]) {
      throw InputError("cdf table is not strictly increasing at index " +
                       std::to_string(i));
    }
  }
}

std::size_t CdfTable::find(std::uint32_t target) const {
  // First entry strictly greater than target, minus one.
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  return static_cast<std::size_t>(it - cdf_.begin()) - 1;
}

void RangeEncoder::encode(std::size_t symbol, const CdfTable& table) {
  if (symbol >= table.symbol_count()) {
    throw InputError("symbol index " + std::to_string(symbol) +
                     " outside table of " +
                     std::to_string(table.symbol_count()) + " symbols");
  }
  const std::uint32_t r = range_ >> kCdfPrecisionBits;
  low_ += static_cast<std::uint64_t>(r) * table.start(symbol);
  range_ = r * table.frequency(symbol);
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::shift_low() {
  // Bit 32 of low is the carry into the bytes not yet emitted.
  if (low_ < 0xFF000000u || low_ >= (1ull << 32)) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    if (has_cache_) out_.push_back(static_cast<std::uint8_t>(cache_ + carry));
    for (; pending_ > 0; --pending_) {
      out_.push_back(static_cast<std::uint8_t>(0xFF + carry));
    }
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
    has_cache_ = true;
  } else {
    ++pending_;
  }
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

std::vector<std::uint8_t> RangeEncoder::finish() && {
  // The interval never exceeds its initial [0, 2^32), so no carry can reach
  // past the first emitted byte; the phantom byte before it is never written.
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes)
    : bytes_(bytes) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ >= bytes_.size()) {
    throw CorruptStreamError("range decoder ran past the end of the stream");
  }
  return bytes_[pos_++];
}

std::size_t RangeDecoder::decode(const CdfTable& table) {
  const std::uint32_t r = range_ >> kCdfPrecisionBits;
  const std::uint32_t target = code_ / r;
  if (target >= kCdfTotal) {
    throw CorruptStreamError("range decoder target outside the cdf");
  }
  const std::size_t symbol = table.find(target);
  code_ -= r * table.start(symbol);
  range_ = r * table.frequency(symbol);
  while (range_ < kTop) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
  }
  return symbol;
}

void RangeDecoder::finish() const {
  if (pos_ != bytes_.size()) {
    throw CorruptStreamError(std::to_string(bytes_.size() - pos_) +
                             " unread bytes after the last symbol");
  }
}

std::vector<std::uint8_t> rc_encode(std::span<const std::uint32_t> symbols,
                                    std::span<const CdfTable> tables) {
  if (symbols.size() != tables.size()) {
    throw InputError("rc_encode: need exactly one table per symbol");
  }
  RangeEncoder enc;
  for (std::size_t i = 0; i < symbols.size(); ++i) enc.encode(symbols[i], tables[i]);
  return std::move(enc).finish();
}

std::vector<std::uint32_t> rc_decode(std::span<const std::uint8_t> bytes,
                                     std::span<const CdfTable> tables) {
  RangeDecoder dec(bytes);
  std::vector<std::uint32_t> out;
  out.reserve(tables.size());
  for (const CdfTable& t : tables) {
    out.push_back(static_cast<std::uint32_t>(dec.decode(t)));
  }
  dec.finish();
  return out;
}

}  // namespace tinylic
