#include "kbeta/multivar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace kbeta {

namespace {

void check_finite_positive(const std::vector<double>& v, const char* name) {
  for (double x : v) {
    if (!std::isfinite(x) || !(x > 0.0)) {
      throw DomainError(std::string(name) + " entries must be finite and > 0");
    }
  }
}

void check_finite_nonneg(const std::vector<double>& v, const char* name) {
  for (double x : v) {
    if (!std::isfinite(x) || !(x >= 0.0)) {
      throw DomainError(std::string(name) + " entries must be finite and >= 0");
    }
  }
}

void require_simplex(const PhiVec& pv) {
  if (pv.size() < 2) throw DomainError("simplex functions need n >= 2");
  if (pv.size() > kMaxDim) {
    throw DomainError("at most " + std::to_string(kMaxDim) + " variables");
  }
}

QuadResult integrate(const PhiVec& pv, const SimplexIntegrand& g,
                     const EvalMethod& m) {
  require_simplex(pv);
  if (m.method == QuadMethod::deterministic) {
    return integrate_simplex_det(pv.phi(), g, pv.k(), m.tol);
  }
  RngState rng(m.seed);
  return integrate_simplex_mc(pv.phi(), g, pv.k(), m.samples, rng);
}

}  // namespace

PhiVec::PhiVec(std::vector<double> phi, KParam k) : phi_(std::move(phi)), k_(k) {
  if (phi_.empty()) throw DomainError("phi must have at least one entry");
  check_finite_positive(phi_, "phi");
}

double PhiVec::sigma() const noexcept {
  return std::accumulate(phi_.begin(), phi_.end(), 0.0);
}

PhiVec PhiVec::shifted(double c) const {
  std::vector<double> out(phi_);
  for (double& x : out) x += c;
  return PhiVec(std::move(out), k_);
}

PhiVec PhiVec::scaled(double c) const {
  std::vector<double> out(phi_);
  for (double& x : out) x *= c;
  return PhiVec(std::move(out), k_);
}

void FirstKindParams::validate() const {
  if (!std::isfinite(eta) || !(eta > 0.0)) throw DomainError("eta must be > 0");
  if (!std::isfinite(zeta) || !(zeta >= 0.0)) throw DomainError("zeta must be >= 0");
}

void SecondKindParams::validate(std::size_t n) const {
  if (p.size() != n || q.size() != n || eta.size() != n || zeta.size() != n) {
    throw DomainError("second-kind parameter vectors must all have length n = " +
                      std::to_string(n));
  }
  check_finite_positive(p, "p");
  check_finite_positive(eta, "eta");
  check_finite_nonneg(zeta, "zeta");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(q[i]) || !(q[i] >= p[i])) {
      throw DomainError("second-kind parameters need q_i >= p_i");
    }
  }
}

EvalMethod EvalMethod::automatic(std::size_t n, std::uint64_t seed) {
  EvalMethod m;
  m.method = n <= 3 ? QuadMethod::deterministic : QuadMethod::monte_carlo;
  m.seed = seed;
  return m;
}

EvalMethod EvalMethod::deterministic(double tol) {
  EvalMethod m;
  m.tol = tol;
  return m;
}

EvalMethod EvalMethod::monte_carlo(std::size_t samples, std::uint64_t seed) {
  EvalMethod m;
  m.method = QuadMethod::monte_carlo;
  m.samples = samples;
  m.seed = seed;
  return m;
}

double log_beta_k_n(const PhiVec& pv) {
  if (pv.size() < 2) throw DomainError("beta_k needs n >= 2");
  return log_beta_k_n(pv.phi(), pv.k());
}

double beta_k_n(const PhiVec& pv) { return std::exp(log_beta_k_n(pv)); }

QuadResult beta_k_n_quad(const PhiVec& pv, const EvalMethod& m) {
  return integrate(pv, [](const SimplexPoint&) { return 1.0; }, m);
}

QuadResult beta_ext_n(const PhiVec& pv, double a, const EvalMethod& m) {
  if (!std::isfinite(a) || !(a >= 0.0)) throw DomainError("a must be >= 0");
  const double kv = pv.k().value();
  const double c = std::pow(a, kv) / kv;
  if (c == 0.0) return beta_k_n_quad(pv, m);
  return integrate(pv, [c](const SimplexPoint& t) { return std::exp(-c / pi_of(t)); },
                   m);
}

QuadResult beta_ext_n_vec(const PhiVec& pv, const std::vector<double>& a,
                          const EvalMethod& m, ExtCoupling coupling) {
  if (a.size() != pv.size()) throw DomainError("a must have length n");
  check_finite_nonneg(a, "a");
  const double kv = pv.k().value();
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = std::pow(a[i], kv) / kv;
  if (coupling == ExtCoupling::product) {
    const double total = std::accumulate(c.begin(), c.end(), 0.0);
    if (total == 0.0) return beta_k_n_quad(pv, m);
    return integrate(
        pv, [total](const SimplexPoint& t) { return std::exp(-total / pi_of(t)); }, m);
  }
  return integrate(
      pv,
      [&c](const SimplexPoint& t) {
        double e = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
          if (c[i] > 0.0) e += c[i] / t[i];
        }
        return std::exp(-e);
      },
      m);
}

Estimate mul(const Estimate& x, const Estimate& y) {
  return {x.value * y.value,
          std::abs(x.value) * y.abs_err + std::abs(y.value) * x.abs_err +
              x.abs_err * y.abs_err};
}

Estimate gamma_kc(const PhiVec& pv, const std::vector<double>& c, double tol) {
  if (c.size() != pv.size()) throw DomainError("c must have length n");
  Estimate acc{1.0, 0.0};
  for (std::size_t i = 0; i < pv.size(); ++i) {
    acc = mul(acc, gamma_ext(pv[i], c[i], pv.k(), tol));
  }
  return acc;
}

Estimate gamma_kc_hyp(const PhiVec& pv, const std::vector<double>& c,
                      const std::vector<HypParams>& hv, double tol) {
  if (c.size() != pv.size() || hv.size() != pv.size()) {
    throw DomainError("c and hv must have length n");
  }
  Estimate acc{1.0, 0.0};
  for (std::size_t i = 0; i < pv.size(); ++i) {
    acc = mul(acc, gamma_hyp1(pv[i], c[i], hv[i], pv.k(), tol));
  }
  return acc;
}

QuadResult beta_first(const PhiVec& pv, const FirstKindParams& fp,
                      const EvalMethod& m) {
  fp.validate();
  const double kv = pv.k().value();
  const double ek = std::pow(fp.eta, kv);
  const double c1 = ek / kv;
  const double zk = std::pow(fp.zeta, kv);
  const double c2 = zk > 0.0 ? zk / ek : 0.0;
  const double alpha = fp.h.a() / kv, beta = fp.h.b() / kv;
  return integrate(
      pv,
      [=](const SimplexPoint& t) {
        const double p = pi_of(t);
        return detail::confluent(alpha, beta, -(c1 > 0.0 ? c1 / p : 0.0) - c2 * p);
      },
      m);
}

QuadResult beta_second(const PhiVec& pv, const SecondKindParams& sp,
                       const EvalMethod& m) {
  require_simplex(pv);
  sp.validate(pv.size());
  const double kv = pv.k().value();
  const std::size_t n = pv.size();
  std::vector<double> c1(n), c2(n), alpha(n), beta(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ek = std::pow(sp.eta[i], kv);
    c1[i] = ek / kv;
    const double zk = std::pow(sp.zeta[i], kv);
    c2[i] = zk > 0.0 ? zk / ek : 0.0;
    alpha[i] = sp.p[i] / kv;
    beta[i] = sp.q[i] / kv;
  }
  return integrate(
      pv,
      [&](const SimplexPoint& t) {
        double prod = 1.0;
        for (std::size_t i = 0; i < n && prod != 0.0; ++i) {
          const double l = -(c1[i] > 0.0 ? c1[i] / t[i] : 0.0) - c2[i] * t[i];
          prod *= detail::confluent(alpha[i], beta[i], l);
        }
        return prod;
      },
      m);
}

QuadResult hyp_halfline(double phi, double c, HypParams h, KParam k, double tol) {
  if (!std::isfinite(c) || !(c >= 0.0)) throw DomainError("c must be >= 0");
  if (h.a() < h.b() && !(phi < h.a())) {
    throw DomainError("hyp_halfline diverges unless phi < a_h (or a_h == b_h)");
  }
  const double kv = k.value();
  const double alpha = h.a() / kv, beta = h.b() / kv;
  const double pivot = std::max(1.0, std::pow(c, 1.0 / kv));
  if (!(std::log(pivot) < 600.0)) {
    throw DomainError("hyp_halfline: c^(1/k) beyond the quadrature range");
  }
  return integrate_halfline_pivot(
      phi,
      [=](double m) -> Estimate {
        return {detail::confluent(alpha, beta, -c - std::pow(m, kv)), 0.0};
      },
      pivot, tol);
}

}  // namespace kbeta
