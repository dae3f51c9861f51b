#pragma once

#include <cstddef>
#include <span>

#include "kbeta/types.hpp"

namespace kbeta {

/// Truncation control of the confluent hypergeometric series.
/// Summation stops once three consecutive terms are below rel_tol times the
/// partial sum and the terms are decreasing.
struct SeriesControl {
  double rel_tol = 1e-16;
  std::size_t max_terms = 20000;

  void validate() const;
};

/// Tolerance used by the quadrature-backed scalar functions.
inline constexpr double kScalarTol = 1e-12;

/// Rising k-factorial a (a+k) ... (a+(m-1)k). Throws RangeError on overflow.
double poch_k(double a, std::size_t m, KParam k);

/// k-gamma function, from the scaling identity with the classical gamma.
Estimate gamma_k(double phi, KParam k);
/// k-gamma function by direct quadrature of its defining integral.
Estimate gamma_k_integral(double phi, KParam k, double tol = kScalarTol);
double log_gamma_k(double phi, KParam k);

/// log of the n-variable k-beta function, prod Gamma_k(phi_i) / Gamma_k(sum).
double log_beta_k_n(std::span<const double> phi, KParam k);

/// Two-variable k-beta function by quadrature.
Estimate beta_k2(double phi, double psi, KParam k, double tol = kScalarTol);

/// Extended k-gamma: weight exp(-m^k/k - a^k/(k m^k)).
Estimate gamma_ext(double phi, double a, KParam k, double tol = kScalarTol);

/// Extended k-beta with the coupled factor exp(-a^k / (k m (1-m))).
Estimate beta_ext1(double phi, double psi, double a, KParam k,
                   double tol = kScalarTol);

/// How the first exponential of the two-parameter extended beta is read.
enum class ExtBetaReading {
  k_scaled,    ///< exp(-a^k/(k m)) exp(-b^k/(k(1-m)))
  as_printed,  ///< exp(-a^k/m)     exp(-b^k/(k(1-m)))
};

/// Two-parameter extended k-beta.
Estimate beta_ext2(double phi, double psi, double a, double b, KParam k,
                   ExtBetaReading reading = ExtBetaReading::k_scaled,
                   double tol = kScalarTol);

/// Confluent hypergeometric k-function 1F1,k(a; b; l), series definition.
/// Negative arguments go through the Kummer transform (all terms positive);
/// large |l| uses the leading asymptotic expansion when it is accurate to
/// working precision.
Estimate hyp1f1k(HypParams h, double l, KParam k, const SeriesControl& ctl = {});

/// Natural log of 1F1,k(a; b; l). Finite for arguments where the value
/// itself would overflow.
double log_hyp1f1k(HypParams h, double l, KParam k, const SeriesControl& ctl = {});

/// Euler integral form, normalised so that the value at l = 0 is 1.
Estimate hyp1f1k_integral(HypParams h, double l, KParam k, double tol = kScalarTol);

/// e^l * 1F1,k(b - a; b; -l).
Estimate hyp1f1k_kummer(HypParams h, double l, KParam k,
                        const SeriesControl& ctl = {});

/// d/dl 1F1,k(a; b; l) = (a/b) 1F1,k(a + k; b + k; l).
Estimate hyp1f1k_deriv(HypParams h, double l, KParam k,
                       const SeriesControl& ctl = {});

/// Two-variable beta with a 1F1,k(a_h; b_h; -a^k/(k m (1-m))) factor.
Estimate beta_hyp2(double phi, double psi, double a, HypParams h, KParam k,
                   double tol = kScalarTol);

/// Gamma with a 1F1,k(a_h; b_h; -m^k/k - a^k/(k m^k)) factor.
Estimate gamma_hyp1(double phi, double a, HypParams h, KParam k,
                    double tol = kScalarTol);

namespace detail {

struct LogEstimate {
  double log_value;  ///< may be -inf (value 0) or large (value overflows)
  double rel_err;
};

/// Classical Kummer function M(alpha, beta, x) in log form, for
/// 0 <= alpha <= beta, beta > 0. This is 1F1,k with alpha = a/k, beta = b/k.
LogEstimate log_confluent(double alpha, double beta, double x,
                          const SeriesControl& ctl = {});

/// exp(log_confluent(...)) without error bookkeeping; the integrand hot path.
double confluent(double alpha, double beta, double x);

}  // namespace detail

}  // namespace kbeta
