#pragma once

#include <stdexcept>
#include <string>

namespace cimclg {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A model/contour/experiment setting is out of its admissible range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A parameter carries NaN or infinity.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// Evaluation at a point where a denominator vanishes.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input length does not match the discretisation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A Laplace-domain system at a contour node could not be solved.
class NodeFailure : public Error {
 public:
  NodeFailure(std::size_t node, const std::string& what)
      : Error("contour node " + std::to_string(node) + ": " + what), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

// Numerical inversion of the waiting-time law produced unusable output.
class InversionError : public Error {
 public:
  using Error::Error;
};

}  // namespace cimclg
