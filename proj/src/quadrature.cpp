#include "kbeta/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "kbeta/scalar.hpp"

namespace kbeta {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

// Step of the coarsest level and refinement limits of the double-exponential
// rules. Level L uses step kH0 / 2^L.
constexpr double kH0 = 0.5;
constexpr int kMinLevel = 3;
constexpr int kMaxLevel = 9;
// Outside |s| > kCoreHalfWidth a direction is abandoned after two
// consecutive terms below kTrimRel times the running sum.
constexpr double kCoreHalfWidth = 1.5;
constexpr double kTrimRel = 1e-22;

struct DeOutcome {
  QuadResult result;
  bool converged = false;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Generic double-exponential driver. `node(s)` returns the transformed
// integrand (Jacobian included) and its propagated error at abscissa s.
template <class Node>
DeOutcome de_integrate(Node&& node, double s_min, double s_max, double tol) {
  std::size_t evals = 0;
  double sum = 0.0;      // sum of node values, without the step factor
  double abs_sum = 0.0;  // sum of |node values|
  double err_sum = 0.0;  // sum of propagated node errors

  auto eval = [&](double s) {
    Estimate e = node(s);
    ++evals;
    if (!std::isfinite(e.value)) {
      throw NumericError("non-finite integrand value", sum, std::abs(e.value));
    }
    sum += e.value;
    abs_sum += std::abs(e.value);
    err_sum += std::abs(e.abs_err);
    return std::abs(e.value);
  };

  // Coarsest level: walk outwards from 0 and trim negligible tails.
  eval(0.0);
  double lo = s_min, hi = s_max;
  {
    int small = 0;
    double s = kH0;
    for (; s <= s_max; s += kH0) {
      const double a = eval(s);
      if (s > kCoreHalfWidth && a <= kTrimRel * std::abs(sum)) {
        if (++small == 2) break;
      } else {
        small = 0;
      }
    }
    hi = std::min(s, s_max);
    small = 0;
    s = -kH0;
    for (; s >= s_min; s -= kH0) {
      const double a = eval(s);
      if (-s > kCoreHalfWidth && a <= kTrimRel * std::abs(sum)) {
        if (++small == 2) break;
      } else {
        small = 0;
      }
    }
    lo = std::max(s, s_min);
  }

  double h = kH0;
  double estimate = h * sum;
  double err = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int level = 1; level <= kMaxLevel; ++level) {
    h *= 0.5;
    // New abscissae are the odd multiples of h inside [lo, hi].
    const long first = static_cast<long>(std::ceil(lo / h));
    const long last = static_cast<long>(std::floor(hi / h));
    for (long j = first; j <= last; ++j) {
      if ((j & 1L) == 0) continue;
      eval(static_cast<double>(j) * h);
    }
    const double next = h * sum;
    err = std::abs(next - estimate);
    estimate = next;
    if (level >= kMinLevel && err <= tol * std::abs(estimate)) {
      converged = true;
      break;
    }
  }

  QuadResult r;
  r.value = estimate;
  r.abs_err = err + h * err_sum + 8.0 * kEps * h * abs_sum;
  r.evals = evals;
  r.method = QuadMethod::deterministic;
  return {r, converged};
}

// Map s -> x = 1 / (1 + exp(-pi sinh s)) with accurate x, 1-x and logs.
// Beyond |pi sinh s| = kUnitVClamp the logs stay exact but x and 1-x are
// held at the last normal values, so f is read at the clamp point there.
struct UnitNode {
  double x, xc, log_x, log_xc, jac;  // jac = pi cosh s
};

constexpr double kUnitVClamp = 700.0;

UnitNode unit_node(double s) {
  const double v = kPi * std::sinh(s);
  UnitNode n{};
  const double e = std::exp(-std::min(std::abs(v), kUnitVClamp));
  const double l1p = std::log1p(std::exp(-std::abs(v)));
  if (v >= 0.0) {
    n.x = 1.0 / (1.0 + e);
    n.xc = e / (1.0 + e);
    n.log_x = -l1p;
    n.log_xc = -v - l1p;
  } else {
    n.xc = 1.0 / (1.0 + e);
    n.x = e / (1.0 + e);
    n.log_xc = -l1p;
    n.log_x = v - l1p;
  }
  n.jac = kPi * std::cosh(s);
  return n;
}

// Far enough that x^p vanishes beyond it for exponents down to ~4e-3.
const double kUnitSMax = std::asinh(2e5 / kPi);

DeOutcome unit_weighted(double px, double py, const UnitIntegrandEst& f,
                        double tol) {
  auto node = [&](double s) -> Estimate {
    const UnitNode n = unit_node(s);
    const double w = std::exp(px * n.log_x + py * n.log_xc) * n.jac;
    if (w == 0.0) return {0.0, 0.0};
    const Estimate fe = f(n.x, n.xc);
    return {w * fe.value, w * fe.abs_err};
  };
  DeOutcome out = de_integrate(node, -kUnitSMax, kUnitSMax, tol);

  // Past the clamp point x0 the integral reads f(x0) in place of f(x); the
  // mass there is about x0^p / p, and f's drift down to x0 * 1e-3 bounds
  // the error.
  const double x0 = std::exp(-kUnitVClamp);
  auto clamp_error = [&](double p, bool at_one) {
    const double mass = std::exp(-p * kUnitVClamp) / p;
    if (mass == 0.0) return;
    const double x1 = x0 * 1e-3;
    const Estimate f0 = at_one ? f(1.0 - x0, x0) : f(x0, 1.0 - x0);
    const Estimate f1 = at_one ? f(1.0 - x1, x1) : f(x1, 1.0 - x1);
    out.result.abs_err += mass * std::abs(f0.value - f1.value);
    out.result.evals += 2;
  };
  clamp_error(px, false);
  clamp_error(py, true);
  return out;
}

void check_weights(double px, double py) {
  if (!(px > 0.0) || !(py > 0.0) || !std::isfinite(px) || !std::isfinite(py)) {
    throw DomainError("weight exponents must be finite and > 0");
  }
}

QuadResult finish(const DeOutcome& o, double tol, const char* what) {
  const double scale = std::abs(o.result.value);
  if (!o.converged || o.result.abs_err > 10.0 * tol * scale + 1e-290) {
    throw NumericError(std::string(what) + ": tolerance not reached",
                       o.result.value, o.result.abs_err);
  }
  return o.result;
}

}  // namespace

// ---------------------------------------------------------------------------
// SimplexPoint

SimplexPoint SimplexPoint::from_free(std::span<const double> free) {
  if (free.size() + 1 > kMaxDim || free.empty()) {
    throw DomainError("simplex point needs 1.." + std::to_string(kMaxDim - 1) +
                      " free coordinates");
  }
  SimplexPoint p;
  p.n_ = free.size() + 1;
  double s = 0.0;
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (!(free[i] >= 0.0)) throw DomainError("simplex coordinates must be >= 0");
    p.t_[i] = free[i];
    s += free[i];
  }
  if (s > 1.0 + 4.0 * kEps * static_cast<double>(free.size())) {
    throw DomainError("simplex coordinates must sum to at most 1");
  }
  p.t_[free.size()] = std::max(0.0, 1.0 - s);
  return p;
}

SimplexPoint SimplexPoint::from_full(std::span<const double> full) {
  SimplexPoint p;
  p.n_ = std::min(full.size(), kMaxDim);
  std::copy_n(full.begin(), p.n_, p.t_.begin());
  return p;
}

double pi_of(const SimplexPoint& t) {
  double p = 1.0;
  for (double c : t.coords()) p *= c;
  return p;
}

double sup_pi(int n) {
  if (n < 2) throw DomainError("sup_pi needs n >= 2");
  return std::pow(static_cast<double>(n), -static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// RngState

RngState::RngState(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed),
      stream_(stream),
      engine_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

RngState RngState::split(std::uint64_t child) const {
  return RngState(seed_, splitmix64(stream_ * 0x9e3779b97f4a7c15ULL + child + 1));
}

double RngState::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngState::uniform(double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

// ---------------------------------------------------------------------------
// One-dimensional rules

QuadResult integrate_01_weighted(double px, double py, const UnitIntegrand& f,
                                 double tol) {
  return integrate_01_weighted(
      px, py, UnitIntegrandEst([&f](double x, double xc) -> Estimate {
        return {f(x, xc), 0.0};
      }),
      tol);
}

QuadResult integrate_01_weighted(double px, double py, const UnitIntegrandEst& f,
                                 double tol) {
  check_weights(px, py);
  return finish(unit_weighted(px, py, f, tol), tol, "integrate_01_weighted");
}

QuadResult integrate_halfline(double phi, const HalflineIntegrand& f, KParam k,
                              double tol) {
  const double pivot = std::pow(std::max(phi, 1.0), 1.0 / k.value());
  return integrate_halfline_pivot(
      phi, HalflineIntegrandEst([&f](double m) -> Estimate { return {f(m), 0.0}; }),
      pivot, tol);
}

QuadResult integrate_halfline_pivot(double phi, const HalflineIntegrandEst& f,
                                    double pivot, double tol) {
  if (!(phi > 0.0) || !std::isfinite(phi)) {
    throw DomainError("integrate_halfline needs phi > 0");
  }
  if (!(pivot > 0.0) || !std::isfinite(pivot)) {
    throw DomainError("integrate_halfline needs a positive pivot");
  }
  // m = pivot * exp(pi/2 sinh s) with log m <= 690. Below log m = -690 the
  // weight m^phi stays exact but f is read at the clamp point m0, which
  // lets small phi reach the region where m^phi really vanishes.
  const double lp = std::log(pivot);
  const double log_m0 = -690.0;
  const double s_min = std::asinh((-2e5 - lp) / kHalfPi);
  const double s_max = std::asinh((690.0 - lp) / kHalfPi);
  auto node = [&](double s) -> Estimate {
    const double sigma = kHalfPi * std::sinh(s);
    const double log_m = lp + sigma;
    const double m = std::exp(std::max(log_m, log_m0));
    const Estimate fe = f(m);
    if (fe.value == 0.0 && fe.abs_err == 0.0) return {0.0, 0.0};
    const double jac = kHalfPi * std::cosh(s);
    const double log_w = phi * log_m;
    double v = 0.0;
    if (fe.value != 0.0) {
      v = std::copysign(std::exp(log_w + std::log(std::abs(fe.value))), fe.value) * jac;
    }
    const double e =
        fe.abs_err > 0.0 ? std::exp(log_w + std::log(fe.abs_err)) * jac : 0.0;
    return {v, e};
  };
  DeOutcome out = de_integrate(node, s_min, s_max, tol);
  // error of reading f(m0) below m0: mass m0^phi / phi times f's drift
  const double mass = std::exp(phi * log_m0) / phi;
  if (mass > 0.0) {
    const double m0 = std::exp(log_m0);
    out.result.abs_err += mass * std::abs(f(m0).value - f(m0 * 1e-3).value);
    out.result.evals += 2;
  }
  return finish(out, tol, "integrate_halfline");
}

// ---------------------------------------------------------------------------
// Simplex rules

namespace {

// Stick-breaking recursion: t_j = R_j u_j, R_{j+1} = R_j (1 - u_j), with
// u_j weighted by u^(alpha_j - 1) (1-u)^(alpha_{j+1} + ... + alpha_{n-1} - 1).
class StickBreaking {
 public:
  StickBreaking(std::span<const double> alpha, const SimplexIntegrand& g, double tol)
      : alpha_(alpha), g_(g), tol_(tol), n_(alpha.size()) {
    tail_[n_ - 1] = alpha_[n_ - 1];
    for (std::size_t j = n_ - 1; j-- > 0;) tail_[j] = tail_[j + 1] + alpha_[j];
  }

  DeOutcome run() { return level(0, 1.0); }
  std::size_t evals() const { return evals_; }
  bool inner_converged() const { return inner_ok_; }

 private:
  DeOutcome level(std::size_t j, double remaining) {
    if (j + 2 == n_) {
      return unit_weighted(
          alpha_[j], alpha_[j + 1],
          [this, j, remaining](double x, double xc) -> Estimate {
            t_[j] = remaining * x;
            t_[j + 1] = remaining * xc;
            ++evals_;
            return {g_(SimplexPoint::from_full({t_.data(), n_})), 0.0};
          },
          tol_);
    }
    return unit_weighted(
        alpha_[j], tail_[j + 1],
        [this, j, remaining](double x, double xc) -> Estimate {
          t_[j] = remaining * x;
          DeOutcome inner = level(j + 1, remaining * xc);
          // An inner rule that stalls on a negligible value (e.g. at the clamp
          // point, where the integrand is ~1e-300) does not matter; its error
          // is propagated into the outer estimate either way.
          peak_ = std::max(peak_, std::abs(inner.result.value));
          if (!inner.converged && inner.result.abs_err > tol_ * peak_) inner_ok_ = false;
          return inner.result.estimate();
        },
        tol_);
  }

  std::span<const double> alpha_;
  const SimplexIntegrand& g_;
  double tol_;
  std::size_t n_;
  std::array<double, kMaxDim> t_{};
  std::array<double, kMaxDim> tail_{};
  std::size_t evals_ = 0;
  bool inner_ok_ = true;
  double peak_ = 0.0;
};

std::vector<double> alphas_of(std::span<const double> exponents, KParam k) {
  std::vector<double> alpha(exponents.size());
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (!(exponents[i] > 0.0) || !std::isfinite(exponents[i])) {
      throw DomainError("simplex exponents must be finite and > 0");
    }
    alpha[i] = exponents[i] / k.value();
  }
  return alpha;
}

}  // namespace

QuadResult integrate_simplex_det(std::span<const double> exponents,
                                 const SimplexIntegrand& g, KParam k, double tol) {
  const std::size_t n = exponents.size();
  if (n < 2 || n > 4) {
    throw DomainError("deterministic simplex rule supports n in 2..4");
  }
  const std::vector<double> alpha = alphas_of(exponents, k);
  StickBreaking sb(alpha, g, tol);
  DeOutcome o = sb.run();
  o.converged = o.converged && sb.inner_converged();
  const double pref = std::pow(k.value(), 1.0 - static_cast<double>(n));
  o.result.value *= pref;
  o.result.abs_err *= pref;
  o.result.evals = sb.evals();
  return finish(o, tol, "integrate_simplex_det");
}

SimplexPoint sample_dirichlet(std::span<const double> alpha, RngState& rng) {
  const std::size_t n = alpha.size();
  std::array<double, kMaxDim> lg{};
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = alpha[i];
    if (a >= 1.0) {
      lg[i] = std::log(std::gamma_distribution<double>(a, 1.0)(rng.engine()));
    } else {
      // G(a) = G(a+1) U^(1/a), kept in log form so tiny shapes cannot
      // underflow every coordinate at once.
      const double g1 = std::gamma_distribution<double>(a + 1.0, 1.0)(rng.engine());
      const double u = 1.0 - rng.uniform();
      lg[i] = std::log(g1) + std::log(u) / a;
    }
    mx = std::max(mx, lg[i]);
  }
  std::array<double, kMaxDim> t{};
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = std::exp(lg[i] - mx);
    s += t[i];
  }
  for (std::size_t i = 0; i < n; ++i) t[i] /= s;
  return SimplexPoint::from_full({t.data(), n});
}

QuadResult mc_dirichlet(std::span<const double> alpha, const SimplexIntegrand& g,
                        std::size_t samples, RngState& rng) {
  if (samples < 2) throw DomainError("mc_dirichlet needs at least 2 samples");
  if (alpha.size() < 2 || alpha.size() > kMaxDim) {
    throw DomainError("Dirichlet dimension out of range");
  }
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw DomainError("Dirichlet parameters must be finite and > 0");
    }
  }
  // Welford running mean and variance.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = g(sample_dirichlet(alpha, rng));
    if (std::isnan(v)) throw NumericError("integrand returned NaN", mean, 0.0);
    const double d = v - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (v - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  QuadResult r;
  r.value = mean;
  r.stderr_mc = std::sqrt(var / static_cast<double>(samples));
  r.abs_err = 3.0 * *r.stderr_mc;
  r.evals = samples;
  r.method = QuadMethod::monte_carlo;
  return r;
}

QuadResult integrate_simplex_mc(std::span<const double> exponents,
                                const SimplexIntegrand& g, KParam k,
                                std::size_t samples, RngState& rng) {
  const std::vector<double> alpha = alphas_of(exponents, k);
  const double scale = std::exp(log_beta_k_n(exponents, k));
  QuadResult r = mc_dirichlet(alpha, g, samples, rng);
  r.value *= scale;
  *r.stderr_mc *= scale;
  r.abs_err = 3.0 * *r.stderr_mc;
  return r;
}

}  // namespace kbeta
