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

#ifndef TINYLIC_ERRORS_HPP_
#define TINYLIC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace tinylic {

// Base class for every recoverable error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or parameter dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A model configuration (or a value derived from it) is invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied argument violates an operation's precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

// A non-finite scalar was produced or consumed by a kernel.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A container (bitstream, weight file, image) is malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

// The entropy decoder lost synchronization with the encoder.
class CorruptStreamError : public Error {
 public:
  using Error::Error;
};

// A weight file does not match the model configuration it is loaded for.
class WeightLoadError : public Error {
 public:
  using Error::Error;
};

// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

// The context-model schedule was violated. This is a programming error, not
// a property of the input data.
class SchedulingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace tinylic

#endif  // TINYLIC_ERRORS_HPP_
