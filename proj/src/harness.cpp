#include "kbeta/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

#include "kbeta/scalar.hpp"

namespace kbeta {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxDraws = 5000;
// Moment orders keep this distance from the divergence boundary.
constexpr double kMomentGap = 0.2;

// ---------------------------------------------------------------------------
// Estimate arithmetic

Estimate scale(const Estimate& x, double c) {
  return {c * x.value, std::abs(c) * x.abs_err};
}

Estimate add(const Estimate& x, const Estimate& y) {
  return {x.value + y.value, x.abs_err + y.abs_err};
}

Estimate sub(const Estimate& x, const Estimate& y) {
  return {x.value - y.value, x.abs_err + y.abs_err};
}

Estimate div(const Estimate& x, const Estimate& y) {
  const double ay = std::abs(y.value);
  return {x.value / y.value, x.abs_err / ay + std::abs(x.value) * y.abs_err / (ay * ay)};
}

Estimate exact(double v) { return {v, 0.0}; }

// A closed form evaluated through logs: relative error grows with |log v|.
Estimate from_log(double lv) {
  const double v = std::exp(lv);
  return {v, v * kEps * (16.0 + 4.0 * std::abs(lv))};
}

Estimate est(const QuadResult& r) { return r.estimate(); }

// 1F1,k(a; b; l), allowing a == 0 where the function is identically 1.
Estimate hyp(double a, double b, double l, KParam k) {
  if (a == 0.0) return exact(1.0);
  return hyp1f1k(HypParams(a, b), l, k);
}

// e^s * 1F1,k(a; b; l) without overflowing the intermediate factor.
Estimate exp_hyp(double s, double a, double b, double l, KParam k) {
  if (a == 0.0) return from_log(s);
  const double lv = s + log_hyp1f1k(HypParams(a, b), l, k);
  const Estimate f = hyp1f1k(HypParams(a, b), l, k);
  const double rel = f.value > 0.0 ? f.abs_err / f.value : 0.0;
  const double v = std::exp(lv);
  return {v, v * (rel + kEps * (4.0 + std::abs(s)))};
}

// ---------------------------------------------------------------------------
// Evaluation helpers

EvalMethod method_for(std::size_t n, const TrialParams& tp, const CheckOptions& opt) {
  if (opt.force_mc || n > 3) return EvalMethod::monte_carlo(opt.mc_samples, tp.mc_seed);
  return EvalMethod::deterministic(opt.tol);
}

PhiVec phivec(const std::vector<double>& phi, const TrialParams& tp) {
  return PhiVec(phi, KParam(tp.k));
}

Estimate first(const std::vector<double>& phi, double eta, double zeta,
               double a, double b, const TrialParams& tp, const CheckOptions& opt) {
  const FirstKindParams fp{HypParams(a, b), eta, zeta};
  return est(beta_first(phivec(phi, tp), fp, method_for(phi.size(), tp, opt)));
}

Estimate first(const std::vector<double>& phi, double zeta, const TrialParams& tp,
               const CheckOptions& opt) {
  return first(phi, tp.eta, zeta, tp.a, tp.b, tp, opt);
}

SecondKindParams second_params(const TrialParams& tp) {
  return {tp.p, tp.q, tp.eta_v, tp.zeta_v};
}

Estimate second(const std::vector<double>& phi, const TrialParams& tp,
                const CheckOptions& opt) {
  return est(beta_second(phivec(phi, tp), second_params(tp),
                         method_for(phi.size(), tp, opt)));
}

Estimate beta_closed(const std::vector<double>& phi, double k) {
  return from_log(log_beta_k_n(phi, KParam(k)));
}

// The first-kind function at a = b, zeta = 0 (exponential collapse).
Estimate beta_eta(const TrialParams& tp, const CheckOptions& opt) {
  return est(beta_ext_n(phivec(tp.phi, tp), tp.eta, method_for(tp.n(), tp, opt)));
}

// Per-coordinate extended beta, the p = q, zeta = 0 case of the second kind.
Estimate beta_eta_coord(const TrialParams& tp, const CheckOptions& opt) {
  return est(beta_ext_n_vec(phivec(tp.phi, tp), tp.eta_v, method_for(tp.n(), tp, opt),
                            ExtCoupling::coordinate));
}

std::vector<double> plus(const std::vector<double>& x, const std::vector<double>& y,
                         double c = 1.0) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * (x[i] + y[i]);
  return out;
}

std::vector<double> times(const std::vector<double>& x, double c) {
  std::vector<double> out(x);
  for (double& v : out) v *= c;
  return out;
}

std::vector<double> shift(const std::vector<double>& x, double c) {
  std::vector<double> out(x);
  for (double& v : out) v += c;
  return out;
}

double nn(std::size_t n) {
  return std::pow(static_cast<double>(n), static_cast<double>(n));
}

TheoremCase finalize(std::string id, const TrialParams& tp, std::vector<Link> links) {
  TheoremCase c;
  c.theorem_id = std::move(id);
  c.params = tp;
  bool any_fail = false, all_pass = true;
  const Link* decide = nullptr;
  for (const Link& l : links) {
    if (l.informational) continue;
    any_fail = any_fail || l.verdict == Verdict::fail;
    all_pass = all_pass && l.verdict == Verdict::pass;
  }
  c.verdict = any_fail ? Verdict::fail : all_pass ? Verdict::pass : Verdict::inconclusive;
  auto key = [](const Link& l) { return std::isnan(l.margin) ? -kInf : l.margin; };
  for (const Link& l : links) {
    if (l.informational) continue;
    if (c.verdict == Verdict::fail && l.verdict != Verdict::fail) continue;
    if (decide == nullptr || key(l) < key(*decide)) decide = &l;
  }
  if (decide != nullptr) {
    c.lhs = decide->lhs;
    c.rhs = decide->rhs;
    c.margin = decide->margin;
  }
  c.links = std::move(links);
  return c;
}

// ---------------------------------------------------------------------------
// Hypotheses of each theorem beyond the configured ranges.

bool moment_ok(double z, double a, const std::vector<double>& phi, double k,
               bool zeta_moment) {
  if (!(z <= a - kMomentGap)) return false;
  if (!zeta_moment) return true;
  for (double f : phi) {
    if (!((f + a - 2.0 * z) / k >= kMomentGap)) return false;
  }
  return true;
}

bool hypotheses_hold(std::string_view id, const TrialParams& tp) {
  if (id == "eq4.8") {
    return std::all_of(tp.phi.begin(), tp.phi.end(), [&](double f) { return f > tp.k; });
  }
  if (id == "eq4.11") {
    return std::pow(tp.eta, 2.0 * tp.k) >= tp.k * std::pow(tp.zeta, tp.k);
  }
  if (id == "eq4.16") return moment_ok(tp.z, tp.a, tp.phi, tp.k, false);
  if (id == "eq4.20" || id == "eq4.23c") return moment_ok(tp.z, tp.a, tp.phi, tp.k, true);
  if (id == "eq6.10" || id == "eq6.14m") {
    for (std::size_t i = 0; i < tp.n(); ++i) {
      if (!moment_ok(tp.z_v[i], tp.p[i], {tp.phi[i]}, tp.k, true)) return false;
    }
  }
  return true;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void check_range(const Range& r, const char* name, double min, bool strict) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    throw ConfigError(std::string(name) + " must be a finite interval with lo <= hi");
  }
  if (strict ? !(r.lo > min) : !(r.lo >= min)) {
    throw ConfigError(std::string(name) + (strict ? " must lie above " : " must lie at or above ") +
                      std::to_string(min));
  }
}

double draw(const Range& r, RngState& rng) { return rng.uniform(r.lo, r.hi); }

std::vector<double> draw_vec(std::size_t n, const Range& r, RngState& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = draw(r, rng);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

void SuiteConfig::validate() const {
  check_range(k_range, "k_range", 0.0, true);
  check_range(phi_range, "phi_range", 0.0, true);
  check_range(eta_range, "eta_range", 0.0, true);
  check_range(zeta_range, "zeta_range", 0.0, false);
  check_range(a_range, "a_range", 0.0, true);
  check_range(gap_range, "gap_range", 0.0, true);
  check_range(z_range, "z_range", 0.0, true);
  if (n_values.empty()) throw ConfigError("n_values must not be empty");
  for (int n : n_values) {
    if (n < 2 || n > 4) throw ConfigError("n_values must be within {2, 3, 4}");
  }
  if (!std::isfinite(slack) || slack < 0.0) throw ConfigError("slack must be >= 0");
  if (!(tol > 0.0) || !(tol < 1e-2)) throw ConfigError("tol must lie in (0, 1e-2)");
  if (mc_samples < 2) throw ConfigError("mc_samples must be >= 2");
  if (moment_budget < 1) throw ConfigError("moment_budget must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  for (const std::string& id : theorems) find_theorem(id);
}

CheckOptions CheckOptions::from(const SuiteConfig& cfg) {
  CheckOptions o;
  o.tol = cfg.tol;
  o.slack = cfg.slack;
  o.mutate = cfg.mutate;
  o.printed_shift = cfg.printed_shift;
  o.force_mc = cfg.force_mc;
  o.mc_samples = cfg.mc_samples;
  o.moment_budget = cfg.moment_budget;
  return o;
}

Link compare(std::string name, Estimate lhs, Estimate rhs, const CheckOptions& opt,
             bool informational) {
  Link l;
  l.name = std::move(name);
  l.informational = informational;
  if (opt.mutate) std::swap(lhs, rhs);
  l.lhs = lhs;
  l.rhs = rhs;
  const double lo = lhs.value, hi = rhs.value;
  if (std::isnan(lo) || std::isnan(hi)) {
    l.verdict = Verdict::inconclusive;
    l.margin = kNaN;
    return l;
  }
  if ((hi == kInf && lo < kInf) || (lo == -kInf && hi > -kInf)) {
    l.verdict = Verdict::pass;
    l.margin = 1.0;
    return l;
  }
  const double budget = lhs.abs_err + rhs.abs_err;
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(budget)) {
    // Overflowed evaluations never decide a verdict.
    l.verdict = Verdict::inconclusive;
    l.margin = kNaN;
    return l;
  }
  const double d = hi - lo;
  const double sc = std::max({std::abs(lo), std::abs(hi), 1e-300});
  l.margin = d / sc;
  if (d < -(budget + opt.slack * sc)) {
    l.verdict = Verdict::fail;
  } else if (d > budget) {
    l.verdict = Verdict::pass;
  } else {
    l.verdict = Verdict::inconclusive;
  }
  return l;
}

// ---------------------------------------------------------------------------
// First kind

TheoremCase check_cauchy_schwarz(const TrialParams& tp, const CheckOptions& opt) {
  const Estimate sum = first(plus(tp.phi, tp.psi), tp.zeta, tp, opt);
  const Estimate two_phi = first(times(tp.phi, 2.0), tp.zeta, tp, opt);
  const Estimate two_psi = first(times(tp.psi, 2.0), tp.zeta, tp, opt);
  const Estimate mid = first(plus(tp.phi, tp.psi, 0.5), tp.zeta, tp, opt);
  const Estimate at_phi = first(tp.phi, tp.zeta, tp, opt);
  const Estimate at_psi = first(tp.psi, tp.zeta, tp, opt);
  std::vector<Link> links;
  links.push_back(compare("log-convexity", mul(sum, sum), mul(two_phi, two_psi), opt));
  links.push_back(compare("midpoint-convexity", mid, scale(add(at_phi, at_psi), 0.5), opt));
  return finalize("eq4.1", tp, std::move(links));
}

TheoremCase check_sandwich(const TrialParams& tp, const CheckOptions& opt) {
  const double k = tp.k;
  const double s = opt.printed_shift ? 1.0 : k;
  const Estimate b0 = first(tp.phi, 0.0, tp, opt);
  const Estimate bz = first(tp.phi, tp.zeta, tp, opt);
  const Estimate shifted =
      first(shift(tp.phi, k), tp.eta, 0.0, tp.a + s, tp.b + s, tp, opt);
  const double coef = tp.a / tp.b * std::pow(tp.zeta, k) / std::pow(tp.eta, k);
  const Estimate left = sub(b0, scale(shifted, coef));
  std::vector<Link> links;
  links.push_back(compare("tangent-lower", left, bz, opt));
  links.push_back(compare("zeta-monotone", bz, b0, opt));
  links.push_back(compare("beta-upper", b0, beta_closed(tp.phi, k), opt));
  return finalize("eq4.5", tp, std::move(links));
}

TheoremCase check_tangent_lower(const TrialParams& tp, const CheckOptions& opt) {
  const double k = tp.k;
  const double r = tp.a / tp.b;
  const Estimate bz = first(tp.phi, tp.zeta, tp, opt);
  const Estimate base = beta_closed(tp.phi, k);
  const Estimate down = beta_closed(shift(tp.phi, -k), k);
  const Estimate up = beta_closed(shift(tp.phi, k), k);
  const double ek = std::pow(tp.eta, k);
  const Estimate rhs = sub(sub(base, scale(down, r * ek / k)),
                           scale(up, r * std::pow(tp.zeta, k) / ek));
  std::vector<Link> links;
  links.push_back(compare("tangent-at-zero", rhs, bz, opt));
  return finalize("eq4.8", tp, std::move(links));
}

TheoremCase check_upper_refinement(const TrialParams& tp, const CheckOptions& opt) {
  const KParam k(tp.k);
  const double kv = tp.k;
  const double big_n = nn(tp.n());
  const double ek = std::pow(tp.eta, kv);
  const double zk = std::pow(tp.zeta, kv);
  const Estimate ratio = div(first(tp.phi, tp.zeta, tp, opt), beta_closed(tp.phi, kv));
  const Estimate main = hyp(tp.a, tp.b, -ek * big_n / kv - zk / (ek * big_n), k);
  const Estimate amgm = hyp(tp.a, tp.b, -2.0 * std::sqrt(zk / kv), k);
  std::vector<Link> links;
  links.push_back(compare("sup-bound", ratio, main, opt));
  // At zeta = 0 the remaining links compare identical quantities.
  if (tp.zeta > 0.0) {
    links.push_back(compare("am-gm", main, amgm, opt));
    links.push_back(compare("unit", amgm, exact(1.0), opt));
  }
  if (kv != 1.0 && tp.zeta > 0.0) {
    // The printed middle link uses 2 sqrt(zeta); kept for the record only.
    const Estimate printed = hyp(tp.a, tp.b, -2.0 * std::sqrt(tp.zeta), k);
    links.push_back(compare("printed-middle", main, printed, opt, true));
  }
  return finalize("eq4.11", tp, std::move(links));
}

namespace {

// Inner evaluation for nested moment integrals. A node where the inner rule
// stalls just short of tolerance (far tails, tiny values) keeps its best
// estimate and reported error instead of failing the whole outer integral.
template <class F>
QuadResult lenient(F&& f) {
  try {
    return f();
  } catch (const NumericError& e) {
    if (!std::isfinite(e.best())) throw;
    QuadResult r;
    r.value = e.best();
    r.abs_err = std::max(std::abs(e.magnitude()), 1e-8 * std::abs(e.best()));
    return r;
  }
}

}  // namespace

QuadResult first_eta_moment(const TrialParams& tp, double tol, std::size_t budget) {
  const KParam k(tp.k);
  const PhiVec pv(tp.phi, k);
  const HypParams h(tp.a, tp.b);
  const double pivot = std::pow(tp.k / nn(tp.n()), 1.0 / tp.k);
  std::size_t evals = 0;
  QuadResult r = integrate_halfline_pivot(
      tp.z,
      [&](double eta) -> Estimate {
        const QuadResult in = lenient([&] {
          return beta_first(pv, FirstKindParams{h, eta, 0.0},
                            EvalMethod::deterministic(tol));
        });
        evals += in.evals;
        if (evals > budget) {
          throw NumericError("moment evaluation budget exceeded", in.value,
                             static_cast<double>(evals));
        }
        return in.estimate();
      },
      pivot, tol);
  r.evals = evals;
  return r;
}

QuadResult first_zeta_moment(const TrialParams& tp, double tol, std::size_t budget) {
  const KParam k(tp.k);
  const PhiVec pv(tp.phi, k);
  const HypParams h(tp.a, tp.b);
  const double pivot = tp.eta * std::pow(nn(tp.n()) / tp.k, 1.0 / tp.k);
  std::size_t evals = 0;
  QuadResult r = integrate_halfline_pivot(
      tp.z,
      [&](double zeta) -> Estimate {
        const QuadResult in = lenient([&] {
          return beta_first(pv, FirstKindParams{h, tp.eta, zeta},
                            EvalMethod::deterministic(tol));
        });
        evals += in.evals;
        if (evals > budget) {
          throw NumericError("moment evaluation budget exceeded", in.value,
                             static_cast<double>(evals));
        }
        return in.estimate();
      },
      pivot, tol);
  r.evals = evals;
  return r;
}

TheoremCase check_moment_upper(const TrialParams& tp, const CheckOptions& opt) {
  const KParam k(tp.k);
  const Estimate lhs = est(first_eta_moment(tp, opt.tol, opt.moment_budget));
  const Estimate g = gamma_hyp1(tp.z, 0.0, HypParams(tp.a, tp.b), k, opt.tol);
  const double f = std::pow(nn(tp.n()), -tp.z / tp.k);
  const Estimate rhs = scale(mul(beta_closed(tp.phi, tp.k), g), f);
  std::vector<Link> links;
  links.push_back(compare("eta-moment", lhs, rhs, opt));
  return finalize("eq4.16", tp, std::move(links));
}

TheoremCase check_lower_exp(const TrialParams& tp, const CheckOptions& opt) {
  const KParam k(tp.k);
  const double big_n = nn(tp.n());
  const double ek = std::pow(tp.eta, tp.k);
  const Estimate ratio = div(first(tp.phi, tp.zeta, tp, opt), beta_eta(tp, opt));
  const Estimate bound = exp_hyp(-std::pow(tp.zeta, tp.k) / (ek * big_n), tp.b - tp.a,
                                 tp.b, ek * big_n / tp.k, k);
  std::vector<Link> links;
  links.push_back(compare("kummer-lower", bound, ratio, opt));
  return finalize("eq4.18", tp, std::move(links));
}

namespace {

// eta^z (n^n/k)^(z/k) beta_k(phi; eta)
Estimate zeta_moment_prefactor(const TrialParams& tp, const CheckOptions& opt) {
  const double f = std::pow(tp.eta, tp.z) * std::pow(nn(tp.n()) / tp.k, tp.z / tp.k);
  return scale(beta_eta(tp, opt), f);
}

}  // namespace

TheoremCase check_moment_lower_exp(const TrialParams& tp, const CheckOptions& opt) {
  const KParam k(tp.k);
  const Estimate lhs = est(first_zeta_moment(tp, opt.tol, opt.moment_budget));
  const double ek = std::pow(tp.eta, tp.k);
  const Estimate f = hyp(tp.b - tp.a, tp.b, ek * nn(tp.n()) / tp.k, k);
  const Estimate rhs = mul(mul(zeta_moment_prefactor(tp, opt), gamma_k(tp.z, k)), f);
  std::vector<Link> links;
  links.push_back(compare("zeta-moment", rhs, lhs, opt));
  return finalize("eq4.20", tp, std::move(links));
}

TheoremCase check_lower_hyp(const TrialParams& tp, const CheckOptions& opt) {
  const KParam k(tp.k);
  const double arg = -std::pow(tp.zeta, tp.k) / (std::pow(tp.eta, tp.k) * nn(tp.n()));
  const Estimate ratio = div(first(tp.phi, tp.zeta, tp, opt), beta_eta(tp, opt));
  std::vector<Link> links;
  links.push_back(compare("euler-lower", hyp(tp.a, tp.b, arg, k), ratio, opt));
  return finalize("eq4.23", tp, std::move(links));
}

TheoremCase check_lower_hyp_moment(const TrialParams& tp, const CheckOptions& opt) {
  const KParam k(tp.k);
  const Estimate lhs = est(first_zeta_moment(tp, opt.tol, opt.moment_budget));
  const Estimate g = gamma_hyp1(tp.z, 0.0, HypParams(tp.a, tp.b), k, opt.tol);
  const Estimate rhs = mul(zeta_moment_prefactor(tp, opt), g);
  std::vector<Link> links;
  links.push_back(compare("zeta-moment", rhs, lhs, opt));
  return finalize("eq4.23c", tp, std::move(links));
}

// ---------------------------------------------------------------------------
// Second kind

TheoremCase check_second_convex(const TrialParams& tp, const CheckOptions& opt) {
  const Estimate sum = second(plus(tp.phi, tp.psi), tp, opt);
  const Estimate two_phi = second(times(tp.phi, 2.0), tp, opt);
  const Estimate two_psi = second(times(tp.psi, 2.0), tp, opt);
  const Estimate mid = second(plus(tp.phi, tp.psi, 0.5), tp, opt);
  const Estimate at_phi = second(tp.phi, tp, opt);
  const Estimate at_psi = second(tp.psi, tp, opt);
  std::vector<Link> links;
  links.push_back(compare("log-convexity", mul(sum, sum), mul(two_phi, two_psi), opt));
  links.push_back(compare("midpoint-convexity", mid, scale(add(at_phi, at_psi), 0.5), opt));
  return finalize("eq5.1-convex", tp, std::move(links));
}

TheoremCase check_second_upper(const TrialParams& tp, const CheckOptions& opt) {
  const KParam k(tp.k);
  const Estimate ratio = div(second(tp.phi, tp, opt), beta_closed(tp.phi, tp.k));
  Estimate bound = exact(1.0);
  for (std::size_t i = 0; i < tp.n(); ++i) {
    const double ek = std::pow(tp.eta_v[i], tp.k);
    const double arg = ek / tp.k + std::pow(tp.zeta_v[i], tp.k) / ek;
    bound = mul(bound, exp_hyp(-ek / tp.k, tp.q[i] - tp.p[i], tp.q[i], arg, k));
  }
  std::vector<Link> links;
  links.push_back(compare("unit-simplex-upper", ratio, bound, opt));
  return finalize("eq6.2", tp, std::move(links));
}

TheoremCase check_second_lower(const TrialParams& tp, const CheckOptions& opt) {
  const KParam k(tp.k);
  const Estimate ratio = div(second(tp.phi, tp, opt), beta_eta_coord(tp, opt));
  Estimate plain = exact(1.0), refined = exact(1.0);
  bool refinable = true, any_zeta = false;
  for (std::size_t i = 0; i < tp.n(); ++i) {
    const double ek = std::pow(tp.eta_v[i], tp.k);
    const double zk = std::pow(tp.zeta_v[i], tp.k);
    const double m = std::max(2.0 * std::sqrt(zk / tp.k), ek / tp.k);
    const double gap = tp.q[i] - tp.p[i];
    plain = mul(plain, exp_hyp(-zk / ek, gap, tp.q[i], m, k));
    refined = mul(refined, exp_hyp(-zk / ek, gap, tp.q[i], ek / tp.k + zk / ek, k));
    refinable = refinable && ek * ek >= tp.k * zk;
    any_zeta = any_zeta || zk > 0.0;
  }
  std::vector<Link> links;
  links.push_back(compare("max-argument", plain, ratio, opt));
  if (refinable) {
    links.push_back(compare("refined", refined, ratio, opt));
    if (any_zeta) links.push_back(compare("refined-dominates", plain, refined, opt));
  }
  return finalize("eq6.7", tp, std::move(links));
}

QuadResult second_zeta_moment(const TrialParams& tp, const double tol,
                              std::size_t budget) {
  const KParam k(tp.k);
  const PhiVec pv(tp.phi, k);
  const std::size_t n = tp.n();
  std::vector<double> ek(n);
  std::vector<HypParams> hv;
  for (std::size_t i = 0; i < n; ++i) {
    ek[i] = std::pow(tp.eta_v[i], tp.k);
    hv.emplace_back(tp.p[i], tp.q[i]);
  }
  std::size_t evals = 0;
  double inner_rel = 0.0;
  // H_i(t) = (eta_i^k/t)^(z_i/k) * int u^(z_i-1) 1F1,k(p_i; q_i; -eta_i^k/(k t) - u^k) du
  QuadResult r = integrate_simplex_det(
      tp.phi,
      [&](const SimplexPoint& t) {
        double log_prod = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          // Next to a face H_i(t) ~ t_i^((p_i - z_i)/k) -> 0; the region where
          // the inner pivot (eta_i^k/(k t_i))^(1/k) overflows carries no mass.
          if (std::log(ek[i] / (tp.k * t[i])) / tp.k >= 600.0) return 0.0;
          const QuadResult in = lenient(
              [&] { return hyp_halfline(tp.z_v[i], ek[i] / (tp.k * t[i]), hv[i], k, tol); });
          evals += in.evals;
          if (evals > budget) {
            throw NumericError("moment evaluation budget exceeded", in.value,
                               static_cast<double>(evals));
          }
          if (in.value <= 0.0) return 0.0;
          inner_rel = std::max(inner_rel, in.abs_err / in.value);
          log_prod += tp.z_v[i] / tp.k * (std::log(ek[i]) - std::log(t[i])) +
                      std::log(in.value);
        }
        return std::exp(log_prod);
      },
      k, tol);
  r.abs_err += std::abs(r.value) * inner_rel * static_cast<double>(n);
  r.evals = evals;
  return r;
}

TheoremCase check_second_moments(const TrialParams& tp, const CheckOptions& opt,
                                 SecondMoment which) {
  const KParam k(tp.k);
  const Estimate lhs = est(second_zeta_moment(tp, opt.tol, opt.moment_budget));
  Estimate rhs = beta_eta_coord(tp, opt);
  for (std::size_t i = 0; i < tp.n(); ++i) {
    const double zi = tp.z_v[i];
    const double ek = std::pow(tp.eta_v[i], tp.k);
    rhs = scale(rhs, std::pow(tp.eta_v[i], zi) * std::pow(tp.k, -zi / tp.k));
    if (which == SecondMoment::gamma_product) {
      rhs = mul(rhs, mul(gamma_k(zi, k), hyp(tp.q[i] - tp.p[i], tp.q[i], ek / tp.k, k)));
    } else {
      rhs = mul(rhs, gamma_hyp1(zi, 0.0, HypParams(tp.p[i], tp.q[i]), k, opt.tol));
    }
  }
  std::vector<Link> links;
  links.push_back(compare("zeta-moment", rhs, lhs, opt));
  return finalize(which == SecondMoment::gamma_product ? "eq6.10" : "eq6.14m", tp,
                  std::move(links));
}

TheoremCase check_second_lower_hyp(const TrialParams& tp, const CheckOptions& opt) {
  const KParam k(tp.k);
  const Estimate ratio = div(second(tp.phi, tp, opt), beta_eta_coord(tp, opt));
  Estimate bound = exact(1.0);
  for (std::size_t i = 0; i < tp.n(); ++i) {
    const double arg = -std::pow(tp.zeta_v[i], tp.k) / std::pow(tp.eta_v[i], tp.k);
    bound = mul(bound, hyp(tp.p[i], tp.q[i], arg, k));
  }
  std::vector<Link> links;
  links.push_back(compare("euler-lower", bound, ratio, opt));
  return finalize("eq6.14", tp, std::move(links));
}

// ---------------------------------------------------------------------------
// Registry, sampling, suite

const std::vector<TheoremInfo>& registry() {
  static const std::vector<TheoremInfo> reg = [] {
    using F = ParamFamily;
    std::vector<TheoremInfo> r;
    r.push_back({"eq4.1", "first kind: log-convexity and midpoint convexity in phi",
                 F::first_pair, check_cauchy_schwarz});
    r.push_back({"eq4.5", "first kind: tangent lower bound <= value <= zeta=0 value <= beta_k",
                 F::first, check_sandwich});
    r.push_back({"eq4.8", "first kind: tangent-at-zero lower bound (phi_i > k)", F::first,
                 check_tangent_lower});
    r.push_back({"eq4.11", "first kind: ratio to beta_k below 1F1 at the barycenter",
                 F::first, check_upper_refinement});
    r.push_back({"eq4.16", "first kind: eta-moment upper bound", F::first_eta_moment,
                 check_moment_upper});
    r.push_back({"eq4.18", "first kind: Kummer-form lower bound on the ratio", F::first,
                 check_lower_exp});
    r.push_back({"eq4.20", "first kind: zeta-moment lower bound with Gamma_k(z)",
                 F::first_zeta_moment, check_moment_lower_exp});
    r.push_back({"eq4.23", "first kind: Euler-form lower bound on the ratio", F::first,
                 check_lower_hyp});
    r.push_back({"eq4.23c", "first kind: zeta-moment lower bound with Gamma_k^(a,b)(z)",
                 F::first_zeta_moment, check_lower_hyp_moment});
    r.push_back({"eq5.1-convex", "second kind: log-convexity and midpoint convexity",
                 F::second_pair, check_second_convex});
    r.push_back({"eq6.2", "second kind: upper bound on the ratio to beta_k", F::second,
                 check_second_upper});
    r.push_back({"eq6.7", "second kind: lower bound with max argument, refined branch",
                 F::second, check_second_lower});
    r.push_back({"eq6.10", "second kind: zeta-moment lower bound with Gamma_k(z_i)",
                 F::second_moment,
                 [](const TrialParams& tp, const CheckOptions& o) {
                   return check_second_moments(tp, o, SecondMoment::gamma_product);
                 }});
    r.push_back({"eq6.14", "second kind: Euler-form lower bound on the ratio", F::second,
                 check_second_lower_hyp});
    r.push_back({"eq6.14m", "second kind: zeta-moment lower bound with Gamma_k^(p,q)(z_i)",
                 F::second_moment,
                 [](const TrialParams& tp, const CheckOptions& o) {
                   return check_second_moments(tp, o, SecondMoment::hyp_gamma);
                 }});
    return r;
  }();
  return reg;
}

const TheoremInfo& find_theorem(std::string_view id) {
  for (const TheoremInfo& t : registry()) {
    if (t.id == id) return t;
  }
  throw ConfigError("unknown theorem id: " + std::string(id));
}

TrialParams sample_params(std::string_view theorem_id, const SuiteConfig& cfg,
                          RngState& rng) {
  const TheoremInfo& info = find_theorem(theorem_id);
  cfg.validate();
  using F = ParamFamily;
  const F fam = info.family;
  const bool moment = fam == F::first_eta_moment || fam == F::first_zeta_moment ||
                      fam == F::second_moment;
  const bool is_second = fam == F::second || fam == F::second_pair || fam == F::second_moment;
  const bool unit_k = theorem_id == "eq4.11" && cfg.k_range.lo <= 1.0 && 1.0 <= cfg.k_range.hi;
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    TrialParams tp;
    tp.family = fam;
    std::size_t n = 2;
    if (!moment) {
      const std::size_t idx = std::min(
          cfg.n_values.size() - 1,
          static_cast<std::size_t>(rng.uniform() * static_cast<double>(cfg.n_values.size())));
      n = static_cast<std::size_t>(cfg.n_values[idx]);
    }
    tp.k = draw(cfg.k_range, rng);
    // A quarter of the refinement trials run at k = 1, where the printed
    // middle link of the chain is exact.
    if (unit_k && rng.uniform() < 0.25) tp.k = 1.0;
    tp.phi = draw_vec(n, cfg.phi_range, rng);
    if (fam == F::first_pair || fam == F::second_pair) tp.psi = draw_vec(n, cfg.phi_range, rng);
    if (!is_second) {
      tp.a = draw(cfg.a_range, rng);
      tp.b = tp.a + draw(cfg.gap_range, rng);
      tp.eta = fam == F::first_eta_moment ? 0.0 : draw(cfg.eta_range, rng);
      tp.zeta = moment ? 0.0 : draw(cfg.zeta_range, rng);
      if (moment) tp.z = draw(cfg.z_range, rng);
    } else {
      tp.p = draw_vec(n, cfg.a_range, rng);
      tp.q = tp.p;
      for (double& v : tp.q) v += draw(cfg.gap_range, rng);
      tp.eta_v = draw_vec(n, cfg.eta_range, rng);
      if (moment) {
        tp.zeta_v.assign(n, 0.0);
        tp.z_v = draw_vec(n, cfg.z_range, rng);
      } else {
        tp.zeta_v = draw_vec(n, cfg.zeta_range, rng);
      }
    }
    tp.mc_seed = rng.engine()();
    if (hypotheses_hold(theorem_id, tp)) return tp;
  }
  throw ConfigError("no parameters satisfy the hypotheses of " + std::string(theorem_id) +
                    " within the configured ranges");
}

RngState trial_rng(std::uint64_t seed, std::string_view theorem_id, std::size_t trial) {
  return RngState(seed).split(fnv1a(theorem_id)).split(trial);
}

TheoremCase run_trial(const TheoremInfo& info, const TrialParams& tp,
                      const CheckOptions& opt) {
  try {
    return info.check(tp, opt);
  } catch (const std::exception& e) {
    TheoremCase c;
    c.theorem_id = info.id;
    c.params = tp;
    c.lhs = {kNaN, kNaN};
    c.rhs = {kNaN, kNaN};
    c.verdict = Verdict::inconclusive;
    c.margin = kNaN;
    c.diagnostic = e.what();
    return c;
  }
}

std::size_t SuiteReport::total_fails() const {
  std::size_t s = 0;
  for (const auto& t : summaries) s += t.fails;
  return s;
}

std::size_t SuiteReport::total_inconclusives() const {
  std::size_t s = 0;
  for (const auto& t : summaries) s += t.inconclusives;
  return s;
}

std::size_t SuiteReport::total_trials() const {
  std::size_t s = 0;
  for (const auto& t : summaries) s += t.trials;
  return s;
}

Verdict SuiteReport::verdict() const {
  return total_fails() > 0 ? Verdict::fail : Verdict::pass;
}

std::vector<TheoremSummary> summarize(const std::vector<TheoremCase>& cases,
                                      const std::vector<std::string>& order) {
  std::vector<TheoremSummary> out;
  for (const std::string& id : order) {
    TheoremSummary s;
    s.theorem_id = id;
    std::vector<double> margins;
    for (const TheoremCase& c : cases) {
      if (c.theorem_id != id) continue;
      ++s.trials;
      switch (c.verdict) {
        case Verdict::pass: ++s.passes; break;
        case Verdict::fail: ++s.fails; break;
        case Verdict::inconclusive: ++s.inconclusives; break;
      }
      if (std::isfinite(c.margin)) margins.push_back(c.margin);
    }
    if (margins.empty()) {
      s.worst_margin = s.median_margin = kNaN;
    } else {
      std::sort(margins.begin(), margins.end());
      s.worst_margin = margins.front();
      const std::size_t m = margins.size();
      s.median_margin = m % 2 == 1 ? margins[m / 2] : 0.5 * (margins[m / 2 - 1] + margins[m / 2]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

SuiteReport run_suite(const SuiteConfig& cfg) {
  cfg.validate();
  std::vector<std::string> order;
  for (const TheoremInfo& t : registry()) {
    const bool selected =
        cfg.theorems.empty() ||
        std::find(cfg.theorems.begin(), cfg.theorems.end(), t.id) != cfg.theorems.end();
    if (selected) order.push_back(t.id);
  }
  const CheckOptions opt = CheckOptions::from(cfg);

  // Fail fast on an empty hypothesis region before any expensive work.
  if (cfg.trials > 0) {
    for (const std::string& id : order) {
      RngState rng = trial_rng(cfg.seed, id, 0);
      sample_params(id, cfg, rng);
    }
  }

  const std::size_t total = order.size() * cfg.trials;
  SuiteReport report;
  report.cases.resize(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      const std::string& id = order[i / cfg.trials];
      const std::size_t trial = i % cfg.trials;
      try {
        RngState rng = trial_rng(cfg.seed, id, trial);
        const TrialParams tp = sample_params(id, cfg, rng);
        report.cases[i] = run_trial(find_theorem(id), tp, opt);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(total);
      }
    }
  };
  const unsigned nthreads =
      static_cast<unsigned>(std::min<std::size_t>(cfg.threads, std::max<std::size_t>(total, 1)));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  report.summaries = summarize(report.cases, order);
  return report;
}

}  // namespace kbeta
