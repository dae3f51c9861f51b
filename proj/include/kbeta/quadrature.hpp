#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>

#include "kbeta/types.hpp"

namespace kbeta {

/// Largest simplex dimension (number of coordinates) supported.
inline constexpr std::size_t kMaxDim = 10;

/// A point of the (n-1)-simplex. All n coordinates are stored, the last one
/// being the implied t_n = 1 - sum of the others.
class SimplexPoint {
 public:
  /// From the n-1 free coordinates. Throws DomainError when the point is
  /// outside the simplex.
  static SimplexPoint from_free(std::span<const double> free);
  /// From all n coordinates, trusted to be nonnegative and sum to one.
  /// Integrators use this to keep the last coordinate accurate near 0.
  static SimplexPoint from_full(std::span<const double> full);

  std::size_t size() const noexcept { return n_; }
  double operator[](std::size_t i) const noexcept { return t_[i]; }
  std::span<const double> coords() const noexcept { return {t_.data(), n_}; }

 private:
  std::array<double, kMaxDim> t_{};
  std::size_t n_ = 0;
};

/// Product of all n coordinates.
double pi_of(const SimplexPoint& t);

/// Supremum of pi over the simplex with n coordinates: n^-n.
double sup_pi(int n);

enum class QuadMethod { deterministic, monte_carlo };

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;
  std::size_t evals = 0;
  QuadMethod method = QuadMethod::deterministic;
  std::optional<double> stderr_mc;  ///< Monte Carlo only; abs_err = 3 * stderr.

  Estimate estimate() const { return {value, abs_err}; }
};

/// Caller-owned random stream. Children created with split() are
/// independent of each other and of the parent, so trials can be run in any
/// order and still see the same samples.
class RngState {
 public:
  explicit RngState(std::uint64_t seed, std::uint64_t stream = 0);

  RngState split(std::uint64_t child) const;
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::mt19937_64& engine() noexcept { return engine_; }
  double uniform();  ///< in [0, 1)
  double uniform(double lo, double hi);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// Integrand on (0,1) receiving x and 1-x, both accurate near the endpoints.
using UnitIntegrand = std::function<double(double x, double xc)>;
using UnitIntegrandEst = std::function<Estimate(double x, double xc)>;
using HalflineIntegrand = std::function<double(double m)>;
using HalflineIntegrandEst = std::function<Estimate(double m)>;
using SimplexIntegrand = std::function<double(const SimplexPoint&)>;

/// Default relative tolerance of the deterministic integrators.
inline constexpr double kDefaultTol = 1e-9;

/// Double-exponential quadrature of x^(px-1) (1-x)^(py-1) f(x) over (0,1).
/// Throws NumericError when the tolerance is not reached.
QuadResult integrate_01_weighted(double px, double py, const UnitIntegrand& f,
                                 double tol = kDefaultTol);
QuadResult integrate_01_weighted(double px, double py, const UnitIntegrandEst& f,
                                 double tol = kDefaultTol);

/// Quadrature of m^(phi-1) f(m) over (0, inf), with f decaying like
/// exp(-m^k/k) or at least algebraically faster than m^-phi.
QuadResult integrate_halfline(double phi, const HalflineIntegrand& f, KParam k,
                              double tol = kDefaultTol);

/// As integrate_halfline with an explicit pivot: the scale where the
/// integrand carries most of its mass.
QuadResult integrate_halfline_pivot(double phi, const HalflineIntegrandEst& f,
                                    double pivot, double tol = kDefaultTol);

/// (1/k^(n-1)) * integral over the simplex of prod t_i^(phi_i/k - 1) g(t),
/// iterated over stick-breaking coordinates. n = exponents.size() in 2..4.
QuadResult integrate_simplex_det(std::span<const double> exponents,
                                 const SimplexIntegrand& g, KParam k,
                                 double tol = kDefaultTol);

/// Sample mean of g over Dirichlet(alpha) draws.
QuadResult mc_dirichlet(std::span<const double> alpha, const SimplexIntegrand& g,
                        std::size_t samples, RngState& rng);

/// Draw one Dirichlet(alpha) point. Works for very small alpha without
/// underflowing all coordinates to zero.
SimplexPoint sample_dirichlet(std::span<const double> alpha, RngState& rng);

/// Same integral as integrate_simplex_det, computed as
/// beta_k(phi) * E[g(T)] with T ~ Dirichlet(phi/k). Any n up to kMaxDim.
QuadResult integrate_simplex_mc(std::span<const double> exponents,
                                const SimplexIntegrand& g, KParam k,
                                std::size_t samples, RngState& rng);

}  // namespace kbeta
