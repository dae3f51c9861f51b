#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kbeta {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside a function's domain (phi <= 0, k <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A finite product or sum overflowed. `index()` is the last index reached.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// A series or quadrature did not reach its tolerance.
/// `best()` is the last estimate, `magnitude()` the last term size or error
/// estimate at the time of failure.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double best, double magnitude)
      : Error(what), best_(best), magnitude_(magnitude) {}
  double best() const noexcept { return best_; }
  double magnitude() const noexcept { return magnitude_; }

 private:
  double best_;
  double magnitude_;
};

/// Invalid harness or CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kbeta
