#pragma once

#include <cmath>

#include "kbeta/error.hpp"

namespace kbeta {

/// A value together with a coarse absolute error bound.
struct Estimate {
  double value = 0.0;
  double abs_err = 0.0;
};

/// Deformation parameter k of the k-gamma family. Always finite and > 0.
class KParam {
 public:
  explicit KParam(double k) : k_(k) {
    if (!std::isfinite(k) || !(k > 0.0)) {
      throw DomainError("k must be finite and > 0");
    }
  }
  double value() const noexcept { return k_; }

 private:
  double k_;
};

/// Numerator/denominator parameters (a, b) of the confluent hypergeometric
/// k-function. Requires a > 0 and b >= a; b == a is the exponential collapse.
class HypParams {
 public:
  HypParams(double a, double b) : a_(a), b_(b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a > 0.0) || !(b >= a)) {
      throw DomainError("hypergeometric parameters need a > 0 and b >= a");
    }
  }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

 private:
  double a_;
  double b_;
};

}  // namespace kbeta
