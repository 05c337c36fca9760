// Copyright 2026 The sgt-qudit Authors
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
/**
 * @file error.hpp
 * Exception types thrown by the library.
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgt {

/// Base class of every error raised by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
  public:
    using Error::Error;
};

class DimensionMismatch : public Error {
  public:
    DimensionMismatch(std::size_t lhs, std::size_t rhs)
        : Error("dimension mismatch: " + std::to_string(lhs) + " vs " +
                std::to_string(rhs)) {}
};

/// A state vector collapsed to (numerically) zero norm before normalization.
class DegenerateState : public Error {
  public:
    using Error::Error;
};

class InvalidGain : public Error {
  public:
    using Error::Error;
};

/// Reconstruction requested from a tomogram without a single count.
class NoSignal : public Error {
  public:
    using Error::Error;
};

/// Raised when a density matrix fails the Hermitian / PSD / trace checks.
class NonPhysicalState : public Error {
  public:
    using Error::Error;
};

/// Wraps a measurement failure with the SGT iteration it happened in.
class OracleError : public Error {
  public:
    OracleError(std::size_t iteration, const std::string &what)
        : Error("oracle failed at iteration " + std::to_string(iteration) +
                ": " + what),
          iteration_(iteration) {}

    [[nodiscard]] std::size_t iteration() const noexcept { return iteration_; }

  private:
    std::size_t iteration_;
};

/// Config or artifact parsing failure. `where` names the field path or the
/// line/column inside the document.
class ConfigError : public Error {
  public:
    ConfigError(const std::string &where, const std::string &what)
        : Error(where + ": " + what), where_(where) {}

    [[nodiscard]] const std::string &where() const noexcept { return where_; }

  private:
    std::string where_;
};

} // namespace sgt
