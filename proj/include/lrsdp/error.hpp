// Copyright 2026 The lrsdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace lrsdp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input matrix is not Hermitian within tolerance.
class HermiticityError : public Error {
 public:
  using Error::Error;
};

/// The same (row, column) key was supplied twice.
class DuplicateEntryError : public Error {
 public:
  using Error::Error;
};

/// Row or column index outside [0, n).
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Sampling requested from a distribution with zero total mass.
class ZeroMassError : public Error {
 public:
  using Error::Error;
};

/// Dense factorization failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Dimensions or list lengths disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Every singular value of the column sketch was filtered out.
class EmptySketchError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Problem exceeds the dense reference size caps.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Malformed matrix, manifest or report text.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Broken internal invariant (e.g. a sampled index with zero probability).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lrsdp
