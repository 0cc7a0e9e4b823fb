#pragma once

#include <stdexcept>
#include <string>

namespace epirep {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Empty or malformed convex bodies.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// A Hamiltonian that violates its declared structure, e.g. non-convex in p.
class ModelError : public Error {
 public:
  using Error::Error;
};

// Quadrature or optimizer that failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace epirep
