# Copyright 2026 The TinyLIC Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""TinyLIC learned image codec."""

from ._tinylic import (
    Codec,
    ConfigError,
    CorruptStreamError,
    FormatError,
    InputError,
    IoError,
    ModelConfig,
    NumericError,
    ShapeError,
    TinyLicError,
    WeightLoadError,
    WeightStore,
    build_cdf,
    decode_image,
    encode_image,
    estimate_rate,
    factorized_pmf,
    gaussian_pmf,
    init_weights,
    inspect,
    load_weights,
    load_weights_file,
    mse,
    partition_channels,
    psnr,
    quantize,
    rc_decode,
    rc_encode,
    rd_cost,
    save_weights,
    save_weights_file,
    sf_to_q88,
)

__all__ = [
    "Codec",
    "ConfigError",
    "CorruptStreamError",
    "FormatError",
    "InputError",
    "IoError",
    "ModelConfig",
    "NumericError",
    "ShapeError",
    "TinyLicError",
    "WeightLoadError",
    "WeightStore",
    "build_cdf",
    "decode_image",
    "encode_image",
    "estimate_rate",
    "factorized_pmf",
    "gaussian_pmf",
    "init_weights",
    "inspect",
    "load_weights",
    "load_weights_file",
    "mse",
    "partition_channels",
    "psnr",
    "quantize",
    "rc_decode",
    "rc_encode",
    "rd_cost",
    "save_weights",
    "save_weights_file",
    "sf_to_q88",
]
