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

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "tinylic/errors.hpp"
#include "tinylic/image.hpp"

namespace tinylic {
namespace {

class HeaderScanner {
 public:
  explicit HeaderScanner(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint32_t number(const char* what) {
    skip_space_and_comments();
    std::uint64_t v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 0xFFFFFFFFu) throw FormatError(std::string("PPM ") + what + " too large");
      ++digits;
    }
    if (digits == 0) throw FormatError(std::string("PPM header: missing ") + what);
    return static_cast<std::uint32_t>(v);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError("PPM header: expected whitespace before raster");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image parse_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw FormatError("not a binary PPM (P6) image");
  }
  HeaderScanner scan(bytes);
  scan.advance(2);
  const std::uint32_t width = scan.number("width");
  const std::uint32_t height = scan.number("height");
  const std::uint32_t maxval = scan.number("maxval");
  if (maxval != 255) {
    throw FormatError("only maxval 255 PPM images are supported, got " +
                      std::to_string(maxval));
  }
  scan.single_space();
  const std::size_t need = std::size_t{width} * height * 3;
  if (bytes.size() - scan.pos() < need) {
    throw FormatError("PPM raster truncated");
  }
  Image img(width, height);
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(scan.pos()), need,
              img.samples.begin());
  return img;
}

std::vector<std::uint8_t> serialize_ppm(const Image& img) {
  const std::string header = "P6\n" + std::to_string(img.width) + " " +
                             std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.samples.begin(), img.samples.end());
  return out;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

Image read_ppm(const std::string& path) { return parse_ppm(read_file(path)); }

void write_ppm(const Image& img, const std::string& path) {
  write_file(path, serialize_ppm(img));
}

}  // namespace tinylic
