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

// Python bindings for the tinylic core library.

#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <string>
#include <vector>

#include "tinylic/codec.hpp"
#include "tinylic/context_model.hpp"
#include "tinylic/entropy_models.hpp"
#include "tinylic/errors.hpp"
#include "tinylic/image.hpp"
#include "tinylic/model_config.hpp"
#include "tinylic/quantizer.hpp"
#include "tinylic/range_coder.hpp"
#include "tinylic/weights.hpp"

namespace py = pybind11;

namespace {

using ImageArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

tinylic::Image to_image(const ImageArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) {
    throw tinylic::InputError("image must be an H x W x 3 uint8 array");
  }
  tinylic::Image img(static_cast<std::uint32_t>(a.shape(1)),
                     static_cast<std::uint32_t>(a.shape(0)));
  std::memcpy(img.samples.data(), a.data(), img.samples.size());
  return img;
}

ImageArray from_image(const tinylic::Image& img) {
  ImageArray a({static_cast<py::ssize_t>(img.height), static_cast<py::ssize_t>(img.width),
                py::ssize_t{3}});
  std::memcpy(a.mutable_data(), img.samples.data(), img.samples.size());
  return a;
}

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
  return {reinterpret_cast<const char*>(v.data()), v.size()};
}

std::vector<std::uint8_t> from_bytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

std::vector<tinylic::CdfTable> to_tables(const std::vector<std::vector<std::uint32_t>>& cdfs) {
  std::vector<tinylic::CdfTable> tables;
  tables.reserve(cdfs.size());
  for (const auto& c : cdfs) tables.emplace_back(c);
  return tables;
}

std::vector<std::uint32_t> cdf_list(const tinylic::CdfTable& t) {
  const auto c = t.cumulative();
  return {c.begin(), c.end()};
}

py::dict inspect(const py::bytes& data) {
  const auto bytes = from_bytes(data);
  const tinylic::Bitstream bs = tinylic::Bitstream::parse(bytes);
  std::vector<std::size_t> y_sizes;
  for (const auto& y : bs.y_chunks) y_sizes.push_back(y.size());
  py::dict d;
  d["width"] = bs.width;
  d["height"] = bs.height;
  d["sf"] = bs.sf.value();
  d["sf_q88"] = bs.sf.q88();
  d["config_id"] = bs.config_id;
  d["z_chunk"] = bs.z_chunk.size();
  d["y_chunks"] = y_sizes;
  d["header_bytes"] = bs.header_bytes();
  d["payload_bytes"] = bs.payload_bytes();
  return d;
}

}  // namespace

PYBIND11_MODULE(_tinylic, m) {
  m.doc() = "TinyLIC learned image codec";

  auto base = py::register_exception<tinylic::Error>(m, "TinyLicError", PyExc_RuntimeError);
  py::register_exception<tinylic::ShapeError>(m, "ShapeError", base);
  py::register_exception<tinylic::ConfigError>(m, "ConfigError", base);
  py::register_exception<tinylic::InputError>(m, "InputError", base);
  py::register_exception<tinylic::NumericError>(m, "NumericError", base);
  py::register_exception<tinylic::FormatError>(m, "FormatError", base);
  py::register_exception<tinylic::CorruptStreamError>(m, "CorruptStreamError", base);
  py::register_exception<tinylic::WeightLoadError>(m, "WeightLoadError", base);
  py::register_exception<tinylic::IoError>(m, "IoError", base);

  py::class_<tinylic::ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("depths", &tinylic::ModelConfig::depths)
      .def_readwrite("channels", &tinylic::ModelConfig::channels)
      .def_readwrite("kernel_sizes", &tinylic::ModelConfig::kernel_sizes)
      .def_readwrite("window", &tinylic::ModelConfig::window)
      .def_readwrite("heads", &tinylic::ModelConfig::heads)
      .def_readwrite("mlp_ratio", &tinylic::ModelConfig::mlp_ratio)
      .def_readwrite("latent_channels", &tinylic::ModelConfig::latent_channels)
      .def_readwrite("hyper_channels", &tinylic::ModelConfig::hyper_channels)
      .def("validate", &tinylic::ModelConfig::validate)
      .def("to_json", &tinylic::ModelConfig::to_json)
      .def_static("from_json", [](const std::string& s) { return tinylic::ModelConfig::from_json(s); })
      .def_static("load", &tinylic::ModelConfig::load)
      .def("hash", &tinylic::ModelConfig::hash)
      .def("id", &tinylic::ModelConfig::id)
      .def(py::self == py::self)
      .def("__repr__", [](const tinylic::ModelConfig& c) { return "ModelConfig(" + c.to_json() + ")"; });

  py::class_<tinylic::WeightStore>(m, "WeightStore")
      .def("parameter_count", &tinylic::WeightStore::parameter_count)
      .def("config_hash", &tinylic::WeightStore::config_hash)
      .def("paths", [](const tinylic::WeightStore& ws) {
        std::vector<std::string> out;
        for (const auto& [path, arr] : ws.entries()) out.push_back(path);
        return out;
      })
      .def("__contains__", [](const tinylic::WeightStore& ws, const std::string& p) {
        return ws.contains(p);
      })
      .def("__getitem__", [](const tinylic::WeightStore& ws, const std::string& p) {
        const tinylic::ParamArray& a = ws.at(p);
        std::vector<py::ssize_t> shape(a.shape.begin(), a.shape.end());
        py::array_t<double> out(shape);
        std::memcpy(out.mutable_data(), a.values.data(), a.values.size() * sizeof(double));
        return out;
      })
      .def("bitwise_equal", &tinylic::WeightStore::bitwise_equal);

  m.def("init_weights", &tinylic::init_weights, py::arg("config"), py::arg("seed"));
  m.def("save_weights", [](const tinylic::WeightStore& ws) { return to_bytes(tinylic::save_weights(ws)); });
  m.def("load_weights", [](const py::bytes& b, const tinylic::ModelConfig& cfg) {
    return tinylic::load_weights(from_bytes(b), cfg);
  });
  m.def("save_weights_file", &tinylic::save_weights_file, py::arg("weights"), py::arg("path"));
  m.def("load_weights_file", &tinylic::load_weights_file, py::arg("path"), py::arg("config"));

  py::class_<tinylic::Codec>(m, "Codec")
      .def(py::init<tinylic::ModelConfig, const tinylic::WeightStore&>(), py::arg("config"),
           py::arg("weights"))
      .def("encode",
           [](const tinylic::Codec& c, const ImageArray& img, double sf) {
             tinylic::EncodeResult r;
             const tinylic::Image image = to_image(img);
             {
               py::gil_scoped_release release;
               r = c.encode(image, tinylic::QualityFactor::from_real(sf));
             }
             py::dict d;
             d["bitstream"] = to_bytes(r.bitstream.serialize());
             d["reconstruction"] = from_image(r.reconstruction);
             d["estimated_bits"] = r.estimated_bits_z + r.estimated_bits_y;
             d["estimated_bits_z"] = r.estimated_bits_z;
             d["estimated_bits_y"] = r.estimated_bits_y;
             d["clamped_symbols"] = r.clamped_symbols;
             return d;
           },
           py::arg("image"), py::arg("sf") = 1.0)
      .def("decode",
           [](const tinylic::Codec& c, const py::bytes& data) {
             const auto bytes = from_bytes(data);
             tinylic::Image img;
             {
               py::gil_scoped_release release;
               img = c.decode(tinylic::Bitstream::parse(bytes));
             }
             return from_image(img);
           },
           py::arg("bitstream"));

  m.def("encode_image",
        [](const ImageArray& img, const tinylic::ModelConfig& cfg, const tinylic::WeightStore& ws,
           double sf) {
          return to_bytes(tinylic::encode_image(to_image(img), cfg, ws,
                                                tinylic::QualityFactor::from_real(sf))
                              .bitstream.serialize());
        },
        py::arg("image"), py::arg("config"), py::arg("weights"), py::arg("sf") = 1.0);
  m.def("decode_image",
        [](const py::bytes& data, const tinylic::ModelConfig& cfg, const tinylic::WeightStore& ws) {
          return from_image(tinylic::decode_image(tinylic::Bitstream::parse(from_bytes(data)), cfg, ws));
        },
        py::arg("bitstream"), py::arg("config"), py::arg("weights"));
  m.def("inspect", &inspect, py::arg("bitstream"));

  m.def("mse", [](const ImageArray& a, const ImageArray& b) {
    return tinylic::mse(to_image(a), to_image(b));
  });
  m.def("psnr", [](const ImageArray& a, const ImageArray& b) {
    return tinylic::psnr(to_image(a), to_image(b));
  });
  m.def("rd_cost", &tinylic::rd_cost, py::arg("rate_bits"), py::arg("mse"), py::arg("lam"),
        py::arg("pixels"));

  m.def("gaussian_pmf", &tinylic::gaussian_pmf, py::arg("sigma"));
  m.def("factorized_pmf", [](double loc, double scale) {
    return tinylic::factorized_pmf({loc, scale});
  }, py::arg("loc"), py::arg("scale"));
  m.def("build_cdf", [](const std::vector<double>& pmf) { return cdf_list(tinylic::build_cdf(pmf)); });
  m.def("estimate_rate", [](const std::vector<std::uint32_t>& symbols,
                            const std::vector<std::vector<std::uint32_t>>& cdfs) {
    return tinylic::estimate_rate(symbols, to_tables(cdfs));
  });
  m.def("rc_encode", [](const std::vector<std::uint32_t>& symbols,
                        const std::vector<std::vector<std::uint32_t>>& cdfs) {
    return to_bytes(tinylic::rc_encode(symbols, to_tables(cdfs)));
  });
  m.def("rc_decode", [](const py::bytes& data, const std::vector<std::vector<std::uint32_t>>& cdfs) {
    return tinylic::rc_decode(from_bytes(data), to_tables(cdfs));
  });

  m.def("partition_channels", [](std::size_t c) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& r : tinylic::partition_channels(c)) out.emplace_back(r.first, r.count);
    return out;
  });
  m.def("quantize", [](double value, double mean) { return tinylic::quantize_value(value, mean); });
  m.def("sf_to_q88", [](double sf) { return tinylic::QualityFactor::from_real(sf).q88(); });
}
