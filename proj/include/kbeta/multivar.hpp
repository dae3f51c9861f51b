#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kbeta/quadrature.hpp"
#include "kbeta/scalar.hpp"
#include "kbeta/types.hpp"

namespace kbeta {

/// Shape exponents phi_1..phi_n together with k.
class PhiVec {
 public:
  /// Requires at least one entry, all finite and > 0.
  PhiVec(std::vector<double> phi, KParam k);

  std::size_t size() const noexcept { return phi_.size(); }
  const std::vector<double>& phi() const noexcept { return phi_; }
  double operator[](std::size_t i) const { return phi_[i]; }
  KParam k() const noexcept { return k_; }
  double sigma() const noexcept;

  /// phi + c * (1, ..., 1). Throws DomainError if an entry becomes <= 0.
  PhiVec shifted(double c) const;
  PhiVec scaled(double c) const;

 private:
  std::vector<double> phi_;
  KParam k_;
};

struct FirstKindParams {
  HypParams h;
  double eta;
  double zeta;

  void validate() const;
};

struct SecondKindParams {
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> eta;
  std::vector<double> zeta;

  /// Checks lengths against n, p_i > 0, q_i > p_i, eta_i > 0, zeta_i >= 0.
  /// q_i == p_i is accepted; it is the exponential collapse.
  void validate(std::size_t n) const;
};

struct EvalMethod {
  QuadMethod method = QuadMethod::deterministic;
  double tol = kDefaultTol;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;

  /// Deterministic for n <= 3, Monte Carlo beyond.
  static EvalMethod automatic(std::size_t n, std::uint64_t seed = 0);
  static EvalMethod deterministic(double tol = kDefaultTol);
  static EvalMethod monte_carlo(std::size_t samples, std::uint64_t seed);
};

/// Closed form prod Gamma_k(phi_i) / Gamma_k(sigma), evaluated in log space.
double beta_k_n(const PhiVec& pv);
double log_beta_k_n(const PhiVec& pv);

/// Same quantity by direct integration over the simplex.
QuadResult beta_k_n_quad(const PhiVec& pv, const EvalMethod& m);

/// Extended n-variable beta with factor exp(-a^k / (k pi(t))).
QuadResult beta_ext_n(const PhiVec& pv, double a, const EvalMethod& m);

/// How the per-coordinate exponentials of the vector extended beta couple.
enum class ExtCoupling {
  product,     ///< exp(-sum a_i^k / (k pi(t))), shared denominator
  coordinate,  ///< exp(-sum a_i^k / (k t_i)), per-coordinate denominators
};

QuadResult beta_ext_n_vec(const PhiVec& pv, const std::vector<double>& a,
                          const EvalMethod& m,
                          ExtCoupling coupling = ExtCoupling::product);

/// Orthant gamma with weight exp(-sum m_i^k/k - sum c_i^k/(k m_i^k)),
/// computed as the product of its one-dimensional factors.
Estimate gamma_kc(const PhiVec& pv, const std::vector<double>& c,
                  double tol = kScalarTol);

/// Orthant gamma with prod 1F1,k(hv_i; -m_i^k/k - c_i^k/(k m_i^k)) factors.
Estimate gamma_kc_hyp(const PhiVec& pv, const std::vector<double>& c,
                      const std::vector<HypParams>& hv, double tol = kScalarTol);

/// First-kind generalized beta: the 1F1,k factor takes
/// -eta^k/(k pi(t)) - zeta^k pi(t)/eta^k.
QuadResult beta_first(const PhiVec& pv, const FirstKindParams& fp,
                      const EvalMethod& m);

/// Second-kind generalized beta: per-coordinate factors
/// 1F1,k(p_i; q_i; -eta_i^k/(k t_i) - zeta_i^k t_i/eta_i^k).
QuadResult beta_second(const PhiVec& pv, const SecondKindParams& sp,
                       const EvalMethod& m);

/// Integral of m^(phi-1) 1F1,k(h; -c - m^k) over m > 0 for c >= 0.
/// Finite for phi < h.a() (or h.a() == h.b()).
QuadResult hyp_halfline(double phi, double c, HypParams h, KParam k,
                        double tol = kScalarTol);

/// Product of two estimates with first-order error propagation.
Estimate mul(const Estimate& x, const Estimate& y);

}  // namespace kbeta
