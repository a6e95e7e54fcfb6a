// Copyright 2026 The QACOA Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Exception types shared by every qacoa module.
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qacoa {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Inconsistent dimensions (theta length, state size, grid shape).
class ShapeError : public Error {
  public:
    using Error::Error;
};

/// Problem too large for the dense representation.
class ResourceError : public Error {
  public:
    using Error::Error;
};

/// Malformed input file. Carries the 1-based line number of the fault.
class ParseError : public Error {
  public:
    ParseError(const std::string &msg, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// SPSA gain calibration impossible (gradient estimate vanished).
class CalibrationError : public Error {
  public:
    using Error::Error;
};

/// Orbit collapsed onto a fixed point or short cycle.
class DegenerateOrbitError : public Error {
  public:
    using Error::Error;
};

/// Record grids that cannot be matched cell by cell.
class AlignmentError : public Error {
  public:
    using Error::Error;
};

/// Invalid run configuration or unusable output location.
class ConfigError : public Error {
  public:
    using Error::Error;
};

} // namespace qacoa
