// Copyright (c) 2026 The foleysynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FOLEY_ERRORS_H_
#define FOLEY_ERRORS_H_

#include <stdexcept>
#include <string>

namespace foley {

// Base of every error thrown by the library. The CLI maps the concrete
// subclass onto a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed container (bad RIFF chunk, truncated header, wrong magic).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed container whose encoding we do not handle.
class UnsupportedFormatError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Input does not match what the caller asked for (rate, length, geometry).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the operation's domain (gain <= 0, N > frames, t > 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Tensor shapes do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf or a numerically invalid intermediate.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace foley

#endif  // FOLEY_ERRORS_H_
