// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace lsdd {

// Base of all library errors. exit_code() is what the CLI returns.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

// Bad parameter or configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

// Requested frequency band selects no STFT bins.
class BandError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// Signal shorter than one analysis frame.
class InputTooShortError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// Zero-norm vector passed where a direction is required.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (steering container, UDM cache, WAV, pose/VAD).
class FormatError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace lsdd
