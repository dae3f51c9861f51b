#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "kbeta/multivar.hpp"
#include "kbeta/quadrature.hpp"
#include "kbeta/types.hpp"

namespace kbeta {

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

/// Which parameters a theorem draws; also selects the JSON fields written.
enum class ParamFamily {
  first,             ///< phi, a, b, eta, zeta
  first_pair,        ///< as first, plus psi
  first_eta_moment,  ///< phi, a, b, z (eta integrated, zeta = 0)
  first_zeta_moment, ///< phi, a, b, eta, z (zeta integrated)
  second,            ///< phi, p, q, eta_i, zeta_i
  second_pair,       ///< as second, plus psi
  second_moment,     ///< phi, p, q, eta_i, z_i (zeta_i integrated)
};

struct TrialParams {
  ParamFamily family = ParamFamily::first;
  double k = 1.0;
  std::vector<double> phi;
  std::vector<double> psi;
  double a = 1.0, b = 2.0, eta = 1.0, zeta = 0.0, z = 1.0;
  std::vector<double> p, q, eta_v, zeta_v, z_v;
  std::uint64_t mc_seed = 0;

  std::size_t n() const noexcept { return phi.size(); }
};

/// One claimed inequality lhs <= rhs.
struct Link {
  std::string name;
  Estimate lhs;
  Estimate rhs;
  Verdict verdict = Verdict::inconclusive;
  double margin = 0.0;
  /// Recorded but not part of the theorem's verdict.
  bool informational = false;
};

struct TheoremCase {
  std::string theorem_id;
  TrialParams params;
  Estimate lhs;  ///< of the deciding (smallest-margin) link
  Estimate rhs;
  Verdict verdict = Verdict::inconclusive;
  double margin = 0.0;
  std::vector<Link> links;
  std::string diagnostic;
};

struct Range {
  double lo;
  double hi;
};

struct SuiteConfig {
  std::size_t trials = 200;
  std::uint64_t seed = 42;
  std::vector<int> n_values{2, 3};
  Range k_range{0.5, 3.0};
  Range phi_range{0.2, 5.0};
  Range eta_range{0.2, 3.0};
  Range zeta_range{0.0, 3.0};
  Range a_range{0.2, 3.0};    ///< a, and p_i for the second kind
  Range gap_range{0.2, 3.0};  ///< b - a, and q_i - p_i
  Range z_range{0.2, 3.0};    ///< moment orders
  double slack = 1e-6;
  double tol = 1e-11;
  std::size_t mc_samples = 100000;
  bool force_mc = false;
  std::size_t moment_budget = 2000000;
  /// Check the sandwich bound with the (a+1, b+1) shift instead of (a+k, b+k).
  bool printed_shift = false;
  /// Flip every claimed inequality (mutation control).
  bool mutate = false;
  std::vector<std::string> theorems;  ///< empty = all registered
  unsigned threads = 1;

  /// Throws ConfigError.
  void validate() const;
};

struct CheckOptions {
  double tol = 1e-11;
  double slack = 1e-6;
  bool mutate = false;
  bool printed_shift = false;
  bool force_mc = false;
  std::size_t mc_samples = 100000;
  std::size_t moment_budget = 2000000;

  static CheckOptions from(const SuiteConfig& cfg);
};

/// Error-aware comparison of a claimed lhs <= rhs (flipped when mutating).
Link compare(std::string name, Estimate lhs, Estimate rhs, const CheckOptions& opt,
             bool informational = false);

using CheckFn = std::function<TheoremCase(const TrialParams&, const CheckOptions&)>;

struct TheoremInfo {
  std::string id;
  std::string summary;
  ParamFamily family;
  CheckFn check;
};

/// All registered theorems in a fixed order.
const std::vector<TheoremInfo>& registry();
/// Throws ConfigError for unknown ids.
const TheoremInfo& find_theorem(std::string_view id);

// First kind.
TheoremCase check_cauchy_schwarz(const TrialParams& tp, const CheckOptions& opt);
TheoremCase check_sandwich(const TrialParams& tp, const CheckOptions& opt);
TheoremCase check_tangent_lower(const TrialParams& tp, const CheckOptions& opt);
TheoremCase check_upper_refinement(const TrialParams& tp, const CheckOptions& opt);
TheoremCase check_moment_upper(const TrialParams& tp, const CheckOptions& opt);
TheoremCase check_lower_exp(const TrialParams& tp, const CheckOptions& opt);
TheoremCase check_moment_lower_exp(const TrialParams& tp, const CheckOptions& opt);
TheoremCase check_lower_hyp(const TrialParams& tp, const CheckOptions& opt);
TheoremCase check_lower_hyp_moment(const TrialParams& tp, const CheckOptions& opt);
// Second kind.
TheoremCase check_second_convex(const TrialParams& tp, const CheckOptions& opt);
TheoremCase check_second_upper(const TrialParams& tp, const CheckOptions& opt);
TheoremCase check_second_lower(const TrialParams& tp, const CheckOptions& opt);
enum class SecondMoment { gamma_product, hyp_gamma };
TheoremCase check_second_moments(const TrialParams& tp, const CheckOptions& opt,
                                 SecondMoment which);
TheoremCase check_second_lower_hyp(const TrialParams& tp, const CheckOptions& opt);

/// Left sides of the moment bounds, exposed for testing.
/// Integral over eta > 0 of eta^(z-1) beta_first(phi; eta, zeta = 0).
QuadResult first_eta_moment(const TrialParams& tp, double tol, std::size_t budget);
/// Integral over zeta > 0 of zeta^(z-1) beta_first(phi; eta, zeta).
QuadResult first_zeta_moment(const TrialParams& tp, double tol, std::size_t budget);
/// Integral over zeta in (0,inf)^n of prod zeta_i^(z_i-1) beta_second.
QuadResult second_zeta_moment(const TrialParams& tp, double tol, std::size_t budget);

/// Draw a parameter set satisfying the theorem's hypotheses. Rejection
/// sampling with bounded retries; ConfigError when the region is empty.
TrialParams sample_params(std::string_view theorem_id, const SuiteConfig& cfg,
                          RngState& rng);

/// The random stream of one trial: independent of every other trial.
RngState trial_rng(std::uint64_t seed, std::string_view theorem_id,
                   std::size_t trial);

/// Runs one check, turning evaluation errors into an inconclusive case.
TheoremCase run_trial(const TheoremInfo& info, const TrialParams& tp,
                      const CheckOptions& opt);

struct TheoremSummary {
  std::string theorem_id;
  std::size_t trials = 0;
  std::size_t passes = 0;
  std::size_t fails = 0;
  std::size_t inconclusives = 0;
  double worst_margin = 0.0;   ///< NaN when no case had a finite margin
  double median_margin = 0.0;
};

struct SuiteReport {
  std::vector<TheoremCase> cases;  ///< theorem order, then trial order
  std::vector<TheoremSummary> summaries;

  std::size_t total_fails() const;
  std::size_t total_inconclusives() const;
  std::size_t total_trials() const;
  Verdict verdict() const;  ///< fail if any case failed, else pass
};

SuiteReport run_suite(const SuiteConfig& cfg);

/// Summaries recomputed from a list of cases (order-independent).
std::vector<TheoremSummary> summarize(const std::vector<TheoremCase>& cases,
                                      const std::vector<std::string>& order);

}  // namespace kbeta
