#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace textshape {

/// Base class of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few distinct points, all-collinear input, zero-area polygons.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Every Delaunay triangle was removed by the alpha filter.
class EmptyShapeError : public Error {
 public:
  using Error::Error;
};

class MalformedAnnotationError : public Error {
 public:
  using Error::Error;
};

/// A decoded instance could not be turned into a detection.
class InstanceRejected : public Error {
 public:
  using Error::Error;
};

class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

/// Raised by the network shape planner for inputs the backbone cannot divide.
class PlanShapeError : public Error {
 public:
  using Error::Error;
};

/// Text parse failure. `line()` is 1-based; 0 means "not tied to a line".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Binary raster format violation (bad magic, truncation, unknown version).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace textshape
