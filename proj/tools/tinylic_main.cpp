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

// tinylic command-line front end: encode, decode, inspect, metrics, report.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tinylic/codec.hpp"
#include "tinylic/errors.hpp"
#include "tinylic/image.hpp"
#include "tinylic/model_config.hpp"
#include "tinylic/weights.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitFormat = 3;

struct ModelOptions {
  std::optional<std::uint64_t> seed;
  std::string weights;
  std::string config;
};

void add_model_options(CLI::App* cmd, ModelOptions& m) {
  auto* seed = cmd->add_option("--seed", m.seed, "Derive weights from a seed");
  auto* weights =
      cmd->add_option("--weights", m.weights, "TLWT weight file");
  seed->excludes(weights);
  cmd->add_option("--config", m.config, "JSON model config");
}

tinylic::ModelConfig load_config(const ModelOptions& m) {
  tinylic::ModelConfig cfg =
      m.config.empty() ? tinylic::ModelConfig{} : tinylic::ModelConfig::load(m.config);
  cfg.validate();
  return cfg;
}

tinylic::WeightStore load_store(const ModelOptions& m,
                                const tinylic::ModelConfig& cfg) {
  if (!m.weights.empty()) return tinylic::load_weights_file(m.weights, cfg);
  return tinylic::init_weights(cfg, m.seed.value_or(0));
}

tinylic::QualityFactor parse_sf(double sf) {
  if (!std::isfinite(sf) || sf <= 0.0) {
    throw tinylic::InputError("--sf must be a positive number");
  }
  return tinylic::QualityFactor::from_real(sf);
}

void print_inspect(const tinylic::Bitstream& bs, std::size_t file_bytes) {
  std::printf("magic: TLIC\nversion: %u\n", unsigned{tinylic::Bitstream::kVersion});
  std::printf("width: %u\nheight: %u\n", bs.width, bs.height);
  std::printf("sf_q88: 0x%04x\nsf: %.8g\n", unsigned{bs.sf.q88()}, bs.sf.value());
  std::printf("config_id: %u\n", unsigned{bs.config_id});
  std::printf("chunk z: %zu\n", bs.z_chunk.size());
  for (std::size_t i = 0; i < bs.y_chunks.size(); ++i) {
    std::printf("chunk y%zu: %zu\n", i, bs.y_chunks[i].size());
  }
  std::printf("header_bytes: %zu\npayload_bytes: %zu\nfile_bytes: %zu\n",
              bs.header_bytes(), bs.payload_bytes(), file_bytes);
}

void print_metrics(const tinylic::Image& ref, const tinylic::Image& test) {
  const double e = tinylic::mse(ref, test);
  const double p = tinylic::psnr(ref, test);
  std::printf("mse: %.6f\n", e);
  if (std::isinf(p)) {
    std::printf("psnr_db: inf\n");
  } else {
    std::printf("psnr_db: %.6f\n", p);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TinyLIC learned image codec"};
  app.require_subcommand(1);

  ModelOptions enc_model;
  std::string enc_in, enc_out;
  double enc_sf = 1.0;
  auto* enc = app.add_subcommand("encode", "Compress a P6 PPM into a TLIC file");
  enc->add_option("--input", enc_in, "Input PPM")->required();
  enc->add_option("--output", enc_out, "Output TLIC")->required();
  enc->add_option("--sf", enc_sf, "Quality scaling factor")->capture_default_str();
  add_model_options(enc, enc_model);

  ModelOptions dec_model;
  std::string dec_in, dec_out;
  auto* dec = app.add_subcommand("decode", "Decompress a TLIC file into a PPM");
  dec->add_option("--input", dec_in, "Input TLIC")->required();
  dec->add_option("--output", dec_out, "Output PPM")->required();
  add_model_options(dec, dec_model);

  std::string insp_in;
  auto* insp = app.add_subcommand("inspect", "Print header and chunk sizes");
  insp->add_option("file", insp_in, "TLIC file")->required();

  std::string met_ref, met_test;
  auto* met = app.add_subcommand("metrics", "Compare two PPM images");
  met->add_option("--ref", met_ref, "Reference PPM")->required();
  met->add_option("--test", met_test, "Test PPM")->required();

  ModelOptions rep_model;
  std::string rep_in;
  double rep_sf = 1.0;
  double rep_lambda = tinylic::kDefaultLambda;
  auto* rep = app.add_subcommand("report", "Encode and decode, print rate/distortion");
  rep->add_option("--input", rep_in, "Input PPM")->required();
  rep->add_option("--sf", rep_sf, "Quality scaling factor")->capture_default_str();
  rep->add_option("--lambda", rep_lambda, "Distortion weight")->capture_default_str();
  add_model_options(rep, rep_model);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (*enc) {
      const tinylic::ModelConfig cfg = load_config(enc_model);
      const tinylic::QualityFactor sf = parse_sf(enc_sf);
      const tinylic::Image img = tinylic::read_ppm(enc_in);
      const tinylic::Codec codec(cfg, load_store(enc_model, cfg));
      const auto bytes = codec.encode(img, sf).bitstream.serialize();
      tinylic::write_file(enc_out, bytes);
    } else if (*dec) {
      if (!dec_model.seed && dec_model.weights.empty()) {
        std::cerr << "decode requires --seed or --weights\n" << dec->help();
        return kExitUsage;
      }
      const tinylic::ModelConfig cfg = load_config(dec_model);
      const auto bs = tinylic::Bitstream::parse(tinylic::read_file(dec_in));
      const tinylic::Codec codec(cfg, load_store(dec_model, cfg));
      tinylic::write_ppm(codec.decode(bs), dec_out);
    } else if (*insp) {
      const auto bytes = tinylic::read_file(insp_in);
      print_inspect(tinylic::Bitstream::parse(bytes), bytes.size());
    } else if (*met) {
      print_metrics(tinylic::read_ppm(met_ref), tinylic::read_ppm(met_test));
    } else if (*rep) {
      if (!(rep_lambda >= 0.0)) throw tinylic::InputError("--lambda must be >= 0");
      const tinylic::ModelConfig cfg = load_config(rep_model);
      const tinylic::QualityFactor sf = parse_sf(rep_sf);
      const tinylic::Image img = tinylic::read_ppm(rep_in);
      const tinylic::Codec codec(cfg, load_store(rep_model, cfg));
      const tinylic::EncodeResult enc_result = codec.encode(img, sf);
      const tinylic::Image decoded = codec.decode(enc_result.bitstream);
      std::cout << tinylic::format_report(
          tinylic::make_report(enc_result, img, decoded, rep_lambda));
    }
  } catch (const tinylic::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const tinylic::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const tinylic::CorruptStreamError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const tinylic::WeightLoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
