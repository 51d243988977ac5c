#pragma once

#include <stdexcept>
#include <string>

namespace psconv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or matrix extents that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Requested variants cannot cover every kernel cell.
class CoverageInfeasible : public Error {
 public:
  using Error::Error;
};

class NotPeriodic : public Error {
 public:
  using Error::Error;
};

// Auxiliary vectors of an encoded matrix break the format invariants.
class FormatCorruption : public Error {
 public:
  using Error::Error;
};

class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

}  // namespace psconv
