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

#include "tinylic/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <utility>

#include "tinylic/context_model.hpp"
#include "tinylic/errors.hpp"
#include "tinylic/hashing.hpp"

namespace tinylic {
namespace {

constexpr char kMagic[4] = {'T', 'L', 'W', 'T'};
constexpr std::uint8_t kDtypeF64 = 1;

std::size_t element_count(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_str(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

class SpecBuilder {
 public:
  void add(std::string path, std::vector<std::size_t> shape, ParamInit init,
           std::size_t fan_in = 0) {
    specs_.push_back({std::move(path), std::move(shape), init, fan_in});
  }

  void linear(const std::string& prefix, std::size_t in, std::size_t out) {
    add(prefix + ".weight", {in, out}, ParamInit::kFanIn, in);
    add(prefix + ".bias", {out}, ParamInit::kZero);
  }

  void conv(const std::string& prefix, std::size_t k, std::size_t in,
            std::size_t out) {
    add(prefix + ".weight", {k, k, in, out}, ParamInit::kFanIn, k * k * in);
    add(prefix + ".bias", {out}, ParamInit::kZero);
  }

  void layer_norm(const std::string& prefix, std::size_t c) {
    add(prefix + ".gamma", {c}, ParamInit::kOne);
    add(prefix + ".beta", {c}, ParamInit::kZero);
  }

  void rnab(const std::string& prefix, std::size_t c, const ModelConfig& cfg) {
    const std::size_t e = 2 * cfg.window - 1;
    layer_norm(prefix + ".ln1", c);
    layer_norm(prefix + ".ln2", c);
    for (const char* proj : {"q_proj", "k_proj", "v_proj", "out_proj"}) {
      linear(prefix + ".na." + proj, c, c);
    }
    add(prefix + ".na.pos_bias", {cfg.heads, e, e}, ParamInit::kZero);
    linear(prefix + ".mlp.fc1", c, cfg.mlp_ratio * c);
    linear(prefix + ".mlp.fc2", cfg.mlp_ratio * c, c);
  }

  std::vector<ParamSpec> finish() && {
    std::sort(specs_.begin(), specs_.end(),
              [](const ParamSpec& a, const ParamSpec& b) {
                return a.path < b.path;
              });
    return std::move(specs_);
  }

 private:
  std::vector<ParamSpec> specs_;
};

// Uniform on [-1, 1) from the counter-th draw of the stream `key`.
double uniform_draw(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t bits = splitmix64(key + counter * 0x9e3779b97f4a7c15ULL);
  return static_cast<double>(bits >> 11) * 0x1.0p-52 - 1.0;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const { return pos_ == bytes_.size(); }

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(std::string("weight file truncated while reading ") +
                        what);
    }
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8(const char* what) { return take(1, what)[0]; }
  std::uint32_t u32(const char* what) {
    auto s = take(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | s[i];
    return v;
  }
  std::uint64_t u64(const char* what) {
    auto s = take(8, what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | s[i];
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<ParamSpec> enumerate_parameters(const ModelConfig& cfg) {
  cfg.validate();
  SpecBuilder b;
  for (Network net : {Network::kMainEncoder, Network::kMainDecoder,
                      Network::kHyperEncoder, Network::kHyperDecoder}) {
    for (const StageLayout& s : stage_layouts(cfg, net)) {
      b.conv(s.prefix + ".resample", s.kernel, s.in_channels, s.out_channels);
      for (std::size_t i = 1; i <= s.depth; ++i) {
        b.rnab(s.prefix + ".rnab" + std::to_string(i), s.block_channels(), cfg);
      }
    }
  }
  b.add("entropy_bottleneck.loc", {cfg.hyper_channels}, ParamInit::kZero);
  b.add("entropy_bottleneck.scale", {cfg.hyper_channels}, ParamInit::kOne);

  const std::size_t cy = cfg.latent_channels;
  const GroupPlan groups = partition_channels(cy);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string prefix = "mcm.group" + std::to_string(g + 1);
    b.conv(prefix + ".conv1", 1, kContextInputFactor * cy,
           kContextHiddenFactor * cy);
    b.conv(prefix + ".conv2", 1, kContextHiddenFactor * cy,
           2 * groups[g].count);
  }
  return std::move(b).finish();
}

void WeightStore::insert(std::string path, ParamArray array) {
  if (element_count(array.shape) != array.values.size()) {
    throw WeightLoadError("parameter '" + path + "': shape " +
                          shape_str(array.shape) + " does not match " +
                          std::to_string(array.values.size()) + " values");
  }
  auto [it, inserted] = entries_.try_emplace(std::move(path), std::move(array));
  if (!inserted) {
    throw WeightLoadError("parameter '" + it->first + "' appears twice");
  }
}

bool WeightStore::contains(std::string_view path) const {
  return entries_.find(path) != entries_.end();
}

const ParamArray& WeightStore::at(std::string_view path) const {
  auto it = entries_.find(path);
  if (it == entries_.end()) {
    throw WeightLoadError("missing parameter '" + std::string(path) + "'");
  }
  return it->second;
}

std::size_t WeightStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [path, array] : entries_) n += array.values.size();
  return n;
}

bool WeightStore::bitwise_equal(const WeightStore& other) const {
  if (config_hash_ != other.config_hash_ ||
      entries_.size() != other.entries_.size()) {
    return false;
  }
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  for (; a != entries_.end(); ++a, ++b) {
    if (a->first != b->first || a->second.shape != b->second.shape ||
        a->second.values.size() != b->second.values.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a->second.values.size(); ++i) {
      if (std::bit_cast<std::uint64_t>(a->second.values[i]) !=
          std::bit_cast<std::uint64_t>(b->second.values[i])) {
        return false;
      }
    }
  }
  return true;
}

WeightStore init_weights(const ModelConfig& cfg, std::uint64_t seed) {
  WeightStore ws(cfg.hash());
  for (ParamSpec& spec : enumerate_parameters(cfg)) {
    ParamArray array{spec.shape, std::vector<double>(element_count(spec.shape))};
    switch (spec.init) {
      case ParamInit::kZero:
        break;
      case ParamInit::kOne:
        std::fill(array.values.begin(), array.values.end(), 1.0);
        break;
      case ParamInit::kFanIn: {
        const std::uint64_t key = splitmix64(seed ^ fnv1a64(spec.path));
        // Uniform on [-a, a) has variance a^2 / 3; a = sqrt(3 / fan_in).
        const double a = std::sqrt(3.0 / static_cast<double>(spec.fan_in));
        for (std::size_t i = 0; i < array.values.size(); ++i) {
          array.values[i] = a * uniform_draw(key, i);
        }
        break;
      }
    }
    ws.insert(std::move(spec.path), std::move(array));
  }
  return ws;
}

void check_compatible(const WeightStore& ws, const ModelConfig& cfg) {
  if (ws.config_hash() != cfg.hash()) {
    throw WeightLoadError("weights were built for a different model config");
  }
  const auto specs = enumerate_parameters(cfg);
  for (const ParamSpec& spec : specs) {
    if (!ws.contains(spec.path)) {
      throw WeightLoadError("missing parameter '" + spec.path + "'");
    }
    const ParamArray& a = ws.at(spec.path);
    if (a.shape != spec.shape) {
      throw WeightLoadError("parameter '" + spec.path + "' has shape " +
                            shape_str(a.shape) + ", expected " +
                            shape_str(spec.shape));
    }
  }
  if (ws.entries().size() != specs.size()) {
    std::set<std::string_view> known;
    for (const ParamSpec& spec : specs) known.insert(spec.path);
    for (const auto& [path, array] : ws.entries()) {
      if (!known.contains(path)) {
        throw WeightLoadError("unexpected parameter '" + path + "'");
      }
    }
  }
}

std::vector<std::uint8_t> save_weights(const WeightStore& ws) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kWeightFileVersion);
  put_u64(out, ws.config_hash());
  for (const auto& [path, array] : ws.entries()) {
    put_u32(out, static_cast<std::uint32_t>(path.size()));
    out.insert(out.end(), path.begin(), path.end());
    out.push_back(kDtypeF64);
    out.push_back(static_cast<std::uint8_t>(array.shape.size()));
    for (std::size_t d : array.shape) put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : array.values) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

WeightStore load_weights(std::span<const std::uint8_t> bytes,
                         const ModelConfig& cfg) {
  if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic),
                                      bytes.begin())) {
    throw FormatError("not a TLWT weight file (bad magic)");
  }
  Reader r(bytes.subspan(4));
  const std::uint8_t version = r.u8("version");
  if (version != kWeightFileVersion) {
    throw FormatError("unsupported weight file version " +
                      std::to_string(version));
  }
  const std::uint64_t hash = r.u64("config hash");
  if (hash != cfg.hash()) {
    throw WeightLoadError("weight file was written for a different model config");
  }

  const auto specs = enumerate_parameters(cfg);
  std::map<std::string, const ParamSpec*, std::less<>> expected;
  for (const ParamSpec& s : specs) expected.emplace(s.path, &s);

  WeightStore ws(hash);
  while (!r.done()) {
    const std::uint32_t len = r.u32("path length");
    auto raw = r.take(len, "path");
    std::string path(raw.begin(), raw.end());
    auto it = expected.find(path);
    if (it == expected.end()) {
      throw WeightLoadError("unexpected parameter '" + path + "'");
    }
    if (ws.contains(path)) {
      throw WeightLoadError("parameter '" + path + "' appears twice");
    }
    if (r.u8("dtype") != kDtypeF64) {
      throw WeightLoadError("parameter '" + path + "' has unsupported dtype");
    }
    const std::uint8_t rank = r.u8("rank");
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = r.u32("dims");
    if (shape != it->second->shape) {
      throw WeightLoadError("parameter '" + path + "' has shape " +
                            shape_str(shape) + ", expected " +
                            shape_str(it->second->shape));
    }
    std::vector<double> values(element_count(shape));
    for (double& v : values) v = std::bit_cast<double>(r.u64("values"));
    ws.insert(std::move(path), {std::move(shape), std::move(values)});
  }
  for (const ParamSpec& s : specs) {
    if (!ws.contains(s.path)) {
      throw WeightLoadError("missing parameter '" + s.path + "'");
    }
  }
  return ws;
}

void save_weights_file(const WeightStore& ws, const std::string& path) {
  const auto bytes = save_weights(ws);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

WeightStore load_weights_file(const std::string& path, const ModelConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open weight file '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return load_weights(bytes, cfg);
}

}  // namespace tinylic
