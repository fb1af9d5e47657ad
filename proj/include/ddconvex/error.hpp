// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ddconvex {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A penalty parameter outside its admissible domain (e.g. SCAD with gamma <= 2).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Vector or container sizes that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An interval with lo > hi, or an interval whose selected endpoint is infinite.
class IntervalError : public Error {
 public:
  using Error::Error;
};

/// A path query on a diagram that encodes no root-terminal path.
class NoPathError : public Error {
 public:
  using Error::Error;
};

/// Path enumeration would exceed the caller-supplied cap.
class EnumerationOverflow : public Error {
 public:
  using Error::Error;
};

/// A separation LP ended in a non-optimal state.
class SeparationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data, with the location of the first offending cell.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A required column is missing or ambiguous.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A column with zero variance cannot be standardized.
class DegenerateColumnError : public Error {
 public:
  using Error::Error;
};

}  // namespace ddconvex
