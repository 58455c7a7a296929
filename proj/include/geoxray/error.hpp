#pragma once

#include <stdexcept>
#include <string>

namespace geoxray {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a function (e.g. a point outside the disk).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Array shapes or grids that do not match.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A traced geodesic did not leave the disk before t_max.
class NonTrappingError : public Error {
 public:
  using Error::Error;
};

// Floating point breakdown (e.g. the exit-time root bracket collapsed).
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace geoxray
