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

#ifndef TINYLIC_IMAGE_HPP_
#define TINYLIC_IMAGE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tinylic {

// 8-bit RGB, row-major, channels interleaved.
struct Image {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> samples;

  Image() = default;
  Image(std::uint32_t w, std::uint32_t h)
      : width(w), height(h), samples(std::size_t{w} * h * 3, 0) {}

  std::uint8_t& at(std::uint32_t y, std::uint32_t x, int c) {
    return samples[(std::size_t{y} * width + x) * 3 + c];
  }
  std::uint8_t at(std::uint32_t y, std::uint32_t x, int c) const {
    return samples[(std::size_t{y} * width + x) * 3 + c];
  }

  friend bool operator==(const Image&, const Image&) = default;
};

// Binary PPM (P6, maxval 255). Comments in the header are skipped.
Image parse_ppm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_ppm(const Image& img);

Image read_ppm(const std::string& path);
void write_ppm(const Image& img, const std::string& path);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace tinylic

#endif  // TINYLIC_IMAGE_HPP_
