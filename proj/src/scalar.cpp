#include "kbeta/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kbeta/quadrature.hpp"

namespace kbeta {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRescale = 1e290;
const double kLogRescale = std::log(kRescale);

// Below this |x| the asymptotic expansions are never tried.
constexpr double kAsymNegMin = 25.0;
constexpr double kAsymPosMin = 700.0;
// Relative size under which a neglected part counts as invisible.
constexpr double kAsymAccept = 1e-17;

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw DomainError(std::string(name) + " must be finite and > 0");
  }
}

void require_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || !(v >= 0.0)) {
    throw DomainError(std::string(name) + " must be finite and >= 0");
  }
}

struct SeriesOut {
  double log_value;
  double rel_err;
};

// log M(alpha, beta, x) for x > 0 by the defining series. Every term is
// positive; the partial sum is rescaled instead of overflowing.
SeriesOut positive_series(double alpha, double beta, double x,
                          const SeriesControl& ctl) {
  double sum = 1.0, term = 1.0, log_scale = 0.0, ratio = 0.0;
  int small = 0;
  std::size_t m = 0;
  for (;; ++m) {
    if (m >= ctl.max_terms) {
      throw NumericError("1F1,k series did not converge within max_terms",
                         std::log(sum) + log_scale, term);
    }
    const double md = static_cast<double>(m);
    ratio = (alpha + md) / (beta + md) * x / (md + 1.0);
    term *= ratio;
    sum += term;
    if (sum > kRescale) {
      sum /= kRescale;
      term /= kRescale;
      log_scale += kLogRescale;
    }
    if (term <= ctl.rel_tol * sum) {
      if (++small >= 3 && ratio < 1.0 && md + 1.0 > x) break;
    } else {
      small = 0;
    }
  }
  // Remaining terms are bounded by a geometric tail of ratio x/(m+2).
  const double q = x / (static_cast<double>(m) + 2.0);
  const double tail = q < 1.0 ? term * q / (1.0 - q) : term;
  const double rel = tail / sum + kEps * (2.0 + 0.5 * std::sqrt(static_cast<double>(m)) +
                                          std::log1p(static_cast<double>(m)));
  return {std::log(sum) + log_scale, rel};
}

// Optimally truncated asymptotic series sum_s (p)_s (q)_s / (s! X^s).
// Returns false when the smallest term is not below kAsymAccept * |sum|.
bool asym_sum(double p, double q, double x_big, double& sum) {
  sum = 1.0;
  double term = 1.0;
  for (int s = 0; s < 400; ++s) {
    const double next = term * (p + s) * (q + s) / ((s + 1.0) * x_big);
    if (std::abs(next) <= kAsymAccept * std::abs(sum)) {
      sum += next;
      return sum > 0.0;
    }
    if (std::abs(next) >= std::abs(term)) return false;
    term = next;
    sum += term;
  }
  return false;
}

}  // namespace

void SeriesControl::validate() const {
  if (!(rel_tol > 0.0) || !(rel_tol < 1.0)) {
    throw DomainError("series rel_tol must lie in (0, 1)");
  }
  if (max_terms < 1) throw DomainError("series max_terms must be >= 1");
}

namespace detail {

LogEstimate log_confluent(double alpha, double beta, double x,
                          const SeriesControl& ctl) {
  if (alpha == 0.0 || x == 0.0) return {0.0, 0.0};
  if (alpha == beta) return {x, kEps};
  if (std::isnan(x)) throw DomainError("1F1,k argument is NaN");

  if (x > 0.0) {
    if (x == kInf) return {kInf, 0.0};
    if (x >= kAsymPosMin) {
      // M ~ Gamma(b)/Gamma(a) e^x x^(a-b) sum (b-a)_s (1-a)_s / (s! x^s)
      double s = 0.0;
      if (asym_sum(beta - alpha, 1.0 - alpha, x, s)) {
        const double lv = std::lgamma(beta) - std::lgamma(alpha) + x +
                          (alpha - beta) * std::log(x) + std::log(s);
        return {lv, kEps * (8.0 + std::abs(lv))};
      }
    }
    const SeriesOut so = positive_series(alpha, beta, x, ctl);
    return {so.log_value, so.rel_err};
  }

  const double big = -x;
  if (big == kInf) return {-kInf, 0.0};
  if (big >= kAsymNegMin) {
    // M(a,b,-X) ~ Gamma(b)/Gamma(b-a) X^-a sum (a)_s (a-b+1)_s / (s! X^s);
    // the exponentially small companion must be invisible as well.
    double s = 0.0;
    if (asym_sum(alpha, alpha - beta + 1.0, big, s)) {
      const double log_x = std::log(big);
      const double companion = -big + (2.0 * alpha - beta) * log_x +
                               std::lgamma(beta - alpha) - std::lgamma(alpha) -
                               std::log(s);
      if (companion < std::log(kAsymAccept)) {
        const double lv = std::lgamma(beta) - std::lgamma(beta - alpha) -
                          alpha * log_x + std::log(s);
        return {lv, kEps * (8.0 + std::abs(lv))};
      }
    }
  }
  // Kummer: M(a, b, x) = e^x M(b - a, b, -x), all terms positive.
  const SeriesOut so = positive_series(beta - alpha, beta, big, ctl);
  const double lv = x + so.log_value;
  return {lv, so.rel_err + kEps * (big + std::abs(so.log_value))};
}

double confluent(double alpha, double beta, double x) {
  if (alpha == beta) return std::exp(x);
  return std::exp(log_confluent(alpha, beta, x).log_value);
}

}  // namespace detail

double poch_k(double a, std::size_t m, KParam k) {
  if (!std::isfinite(a)) throw DomainError("poch_k needs a finite base");
  double p = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    p *= a + static_cast<double>(i) * k.value();
    if (!std::isfinite(p)) {
      throw RangeError("poch_k overflowed at index " + std::to_string(i), i);
    }
  }
  return p;
}

double log_gamma_k(double phi, KParam k) {
  require_positive(phi, "phi");
  const double alpha = phi / k.value();
  return (alpha - 1.0) * std::log(k.value()) + std::lgamma(alpha);
}

Estimate gamma_k(double phi, KParam k) {
  require_positive(phi, "phi");
  const double alpha = phi / k.value();
  if (alpha < 170.0) {
    const double v = std::tgamma(alpha) * std::pow(k.value(), alpha - 1.0);
    return {v, 8.0 * kEps * v};
  }
  const double lv = log_gamma_k(phi, k);
  const double v = std::exp(lv);
  return {v, kEps * (8.0 + std::abs(lv)) * v};
}

Estimate gamma_k_integral(double phi, KParam k, double tol) {
  require_positive(phi, "phi");
  const double kv = k.value();
  const QuadResult r = integrate_halfline(
      phi, [kv](double m) { return std::exp(-std::pow(m, kv) / kv); }, k, tol);
  return r.estimate();
}

double log_beta_k_n(std::span<const double> phi, KParam k) {
  if (phi.size() < 2) throw DomainError("beta_k needs at least 2 arguments");
  // Sum of log Gamma_k(phi_i) minus log Gamma_k(sum phi_i).
  double acc = 0.0, sigma = 0.0;
  for (double p : phi) {
    acc += log_gamma_k(p, k);
    sigma += p;
  }
  return acc - log_gamma_k(sigma, k);
}

Estimate beta_k2(double phi, double psi, KParam k, double tol) {
  require_positive(phi, "phi");
  require_positive(psi, "psi");
  const double kv = k.value();
  const QuadResult r = integrate_01_weighted(
      phi / kv, psi / kv, [](double, double) { return 1.0; }, tol);
  return {r.value / kv, r.abs_err / kv};
}

Estimate gamma_ext(double phi, double a, KParam k, double tol) {
  require_positive(phi, "phi");
  require_nonneg(a, "a");
  const double kv = k.value();
  const double ak = std::pow(a, kv);
  const double pivot = std::max(std::pow(std::max(phi, 1.0), 1.0 / kv), a);
  const QuadResult r = integrate_halfline_pivot(
      phi,
      [kv, ak](double m) -> Estimate {
        const double mk = std::pow(m, kv);
        return {std::exp(-mk / kv - (ak > 0.0 ? ak / (kv * mk) : 0.0)), 0.0};
      },
      pivot, tol);
  return r.estimate();
}

Estimate beta_ext1(double phi, double psi, double a, KParam k, double tol) {
  require_positive(phi, "phi");
  require_positive(psi, "psi");
  require_nonneg(a, "a");
  const double kv = k.value();
  const double c = std::pow(a, kv) / kv;
  const QuadResult r = integrate_01_weighted(
      phi / kv, psi / kv,
      [c](double x, double xc) { return c > 0.0 ? std::exp(-c / (x * xc)) : 1.0; },
      tol);
  return {r.value / kv, r.abs_err / kv};
}

Estimate beta_ext2(double phi, double psi, double a, double b, KParam k,
                   ExtBetaReading reading, double tol) {
  require_positive(phi, "phi");
  require_positive(psi, "psi");
  require_nonneg(a, "a");
  require_nonneg(b, "b");
  const double kv = k.value();
  const double ca =
      std::pow(a, kv) / (reading == ExtBetaReading::k_scaled ? kv : 1.0);
  const double cb = std::pow(b, kv) / kv;
  const QuadResult r = integrate_01_weighted(
      phi / kv, psi / kv,
      [ca, cb](double x, double xc) {
        const double e = (ca > 0.0 ? ca / x : 0.0) + (cb > 0.0 ? cb / xc : 0.0);
        return std::exp(-e);
      },
      tol);
  return {r.value / kv, r.abs_err / kv};
}

Estimate hyp1f1k(HypParams h, double l, KParam k, const SeriesControl& ctl) {
  ctl.validate();
  if (std::isnan(l)) throw DomainError("1F1,k argument is NaN");
  const detail::LogEstimate le =
      detail::log_confluent(h.a() / k.value(), h.b() / k.value(), l, ctl);
  double v = std::exp(le.log_value);
  v = std::clamp(v, 0.0, std::exp(std::max(l, 0.0)));
  return {v, v * (le.rel_err + 2.0 * kEps)};
}

double log_hyp1f1k(HypParams h, double l, KParam k, const SeriesControl& ctl) {
  ctl.validate();
  if (std::isnan(l)) throw DomainError("1F1,k argument is NaN");
  return detail::log_confluent(h.a() / k.value(), h.b() / k.value(), l, ctl)
      .log_value;
}

Estimate hyp1f1k_integral(HypParams h, double l, KParam k, double tol) {
  if (!std::isfinite(l)) throw DomainError("1F1,k integral needs a finite argument");
  if (h.a() == h.b()) {
    const double v = std::exp(l);
    return {v, kEps * v};
  }
  const double alpha = h.a() / k.value();
  const double beta = h.b() / k.value();
  const double log_norm =
      std::lgamma(beta) - std::lgamma(alpha) - std::lgamma(beta - alpha);
  // For l > 0 integrate exp(-l (1-u)) and restore e^l afterwards.
  const double shift = std::max(l, 0.0);
  const QuadResult r = integrate_01_weighted(
      alpha, beta - alpha,
      [l](double u, double uc) { return l > 0.0 ? std::exp(-l * uc) : std::exp(l * u); },
      tol);
  const double scale = std::exp(log_norm + shift);
  return {r.value * scale, r.abs_err * scale + kEps * std::abs(log_norm + shift) *
                                                    std::abs(r.value * scale)};
}

Estimate hyp1f1k_kummer(HypParams h, double l, KParam k, const SeriesControl& ctl) {
  ctl.validate();
  if (std::isnan(l)) throw DomainError("1F1,k argument is NaN");
  const double beta = h.b() / k.value();
  const double swapped = (h.b() - h.a()) / k.value();
  const detail::LogEstimate le = detail::log_confluent(swapped, beta, -l, ctl);
  const double lv = l + le.log_value;
  const double v = std::exp(lv);
  return {v, v * (le.rel_err + kEps * (2.0 + std::abs(l)))};
}

Estimate hyp1f1k_deriv(HypParams h, double l, KParam k, const SeriesControl& ctl) {
  const HypParams shifted(h.a() + k.value(), h.b() + k.value());
  const Estimate e = hyp1f1k(shifted, l, k, ctl);
  const double f = h.a() / h.b();
  return {f * e.value, f * e.abs_err};
}

Estimate beta_hyp2(double phi, double psi, double a, HypParams h, KParam k,
                   double tol) {
  require_positive(phi, "phi");
  require_positive(psi, "psi");
  require_nonneg(a, "a");
  const double kv = k.value();
  const double c = std::pow(a, kv) / kv;
  const double alpha = h.a() / kv, beta = h.b() / kv;
  const QuadResult r = integrate_01_weighted(
      phi / kv, psi / kv,
      [c, alpha, beta](double x, double xc) {
        return c > 0.0 ? detail::confluent(alpha, beta, -c / (x * xc)) : 1.0;
      },
      tol);
  return {r.value / kv, r.abs_err / kv};
}

Estimate gamma_hyp1(double phi, double a, HypParams h, KParam k, double tol) {
  require_positive(phi, "phi");
  require_nonneg(a, "a");
  // For large m the factor decays like m^-a_h only, unless it is exponential.
  if (h.a() < h.b() && !(phi < h.a())) {
    throw DomainError("gamma_hyp1 diverges unless phi < a_h (or a_h == b_h)");
  }
  const double kv = k.value();
  const double ak = std::pow(a, kv);
  const double alpha = h.a() / kv, beta = h.b() / kv;
  const double pivot = std::max(std::pow(std::max(phi, 1.0), 1.0 / kv), a);
  const QuadResult r = integrate_halfline_pivot(
      phi,
      [kv, ak, alpha, beta](double m) -> Estimate {
        const double mk = std::pow(m, kv);
        const double arg = -mk / kv - (ak > 0.0 ? ak / (kv * mk) : 0.0);
        return {detail::confluent(alpha, beta, arg), 0.0};
      },
      pivot, tol);
  return r.estimate();
}

}  // namespace kbeta
