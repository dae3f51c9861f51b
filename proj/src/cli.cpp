#include "kbeta/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kbeta/multivar.hpp"
#include "kbeta/scalar.hpp"

namespace kbeta {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last) {
    throw ConfigError("not a number: '" + raw + "'");
  }
  return v;
}

std::uint64_t parse_seed(const std::string& raw) {
  const std::string s = trim(raw);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("seed must be a non-negative integer: '" + raw + "'");
  }
  return v;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("KBETA_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  try {
    return parse_seed(env);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("KBETA_SEED: ") + e.what());
  }
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// ---------------------------------------------------------------- eval

/// Raw option values keyed by flag name (without dashes).
struct EvalArgs {
  std::map<std::string, std::string> raw;
  std::string coupling = "product";
  std::string method = "auto";
  std::size_t samples = 100000;
  std::uint64_t seed = kDefaultSeed;
  double tol = kScalarTol;
  bool tol_set = false;

  bool has(const std::string& name) const { return raw.count(name) != 0; }

  std::vector<double> vec(const std::string& name) const {
    const auto it = raw.find(name);
    if (it == raw.end()) throw ConfigError("missing --" + name);
    return parse_number_list(it->second);
  }

  double num(const std::string& name) const {
    const std::vector<double> v = vec(name);
    if (v.size() != 1) throw ConfigError("--" + name + " takes a single number");
    return v[0];
  }

  double num_or(const std::string& name, double fallback) const {
    return has(name) ? num(name) : fallback;
  }

  /// A list of length n; a single number is repeated.
  std::vector<double> vec_n(const std::string& name, std::size_t n) const {
    std::vector<double> v = vec(name);
    if (v.size() == 1) v.assign(n, v[0]);
    if (v.size() != n) {
      throw ConfigError("--" + name + " needs 1 or " + std::to_string(n) + " entries");
    }
    return v;
  }

  KParam k() const { return KParam(num("k")); }

  std::size_t count(const std::string& name) const {
    const double x = num(name);
    if (!(x >= 0.0) || x != std::floor(x) || x > 1e9) {
      throw ConfigError("--" + name + " must be a non-negative integer");
    }
    return static_cast<std::size_t>(x);
  }

  EvalMethod eval_method(std::size_t n) const {
    const double t = tol_set ? tol : kDefaultTol;
    if (method == "det") return EvalMethod::deterministic(t);
    if (method == "mc") return EvalMethod::monte_carlo(samples, seed);
    EvalMethod m = EvalMethod::automatic(n, seed);
    m.tol = t;
    m.samples = samples;
    return m;
  }
};

struct EvalResult {
  double value;
  double abs_err;
  std::string method;
  std::optional<std::size_t> evals;
};

EvalResult from_estimate(const Estimate& e, const char* method) {
  return {e.value, e.abs_err, method, std::nullopt};
}

EvalResult from_quad(const QuadResult& r) {
  return {r.value, r.abs_err,
          r.method == QuadMethod::deterministic ? "deterministic" : "monte_carlo",
          r.evals};
}

struct FunctionInfo {
  std::string id;
  std::vector<std::string> params;
  std::string summary;
  std::function<EvalResult(const EvalArgs&)> eval;
};

PhiVec phivec(const EvalArgs& a) { return PhiVec(a.vec("phi"), a.k()); }

const std::vector<FunctionInfo>& functions() {
  static const std::vector<FunctionInfo> fns = [] {
    std::vector<FunctionInfo> f;
    f.push_back({"poch_k", {"a", "m", "k"}, "rising k-factorial",
                 [](const EvalArgs& a) {
                   return EvalResult{poch_k(a.num("a"), a.count("m"), a.k()), 0.0,
                                     "product", std::nullopt};
                 }});
    f.push_back({"gamma_k", {"phi", "k"}, "k-gamma function", [](const EvalArgs& a) {
                   return from_estimate(gamma_k(a.num("phi"), a.k()), "closed_form");
                 }});
    f.push_back({"gamma_k_integral", {"phi", "k", "tol?"}, "k-gamma by quadrature",
                 [](const EvalArgs& a) {
                   return from_estimate(gamma_k_integral(a.num("phi"), a.k(), a.tol),
                                        "quadrature");
                 }});
    f.push_back({"beta_k2", {"phi", "psi", "k", "tol?"}, "two-variable k-beta",
                 [](const EvalArgs& a) {
                   return from_estimate(
                       beta_k2(a.num("phi"), a.num("psi"), a.k(), a.tol), "quadrature");
                 }});
    f.push_back({"gamma_ext", {"phi", "a", "k", "tol?"}, "extended k-gamma",
                 [](const EvalArgs& a) {
                   return from_estimate(gamma_ext(a.num("phi"), a.num("a"), a.k(), a.tol),
                                        "quadrature");
                 }});
    f.push_back({"beta_ext1", {"phi", "psi", "a", "k", "tol?"}, "extended k-beta",
                 [](const EvalArgs& a) {
                   return from_estimate(beta_ext1(a.num("phi"), a.num("psi"), a.num("a"),
                                                  a.k(), a.tol),
                                        "quadrature");
                 }});
    f.push_back({"beta_ext2", {"phi", "psi", "a", "b", "k", "tol?"},
                 "two-parameter extended k-beta", [](const EvalArgs& a) {
                   return from_estimate(
                       beta_ext2(a.num("phi"), a.num("psi"), a.num("a"), a.num("b"),
                                 a.k(), ExtBetaReading::k_scaled, a.tol),
                       "quadrature");
                 }});
    f.push_back({"hyp1f1k", {"a", "b", "l", "k"}, "confluent hypergeometric k-function",
                 [](const EvalArgs& a) {
                   return from_estimate(
                       hyp1f1k(HypParams(a.num("a"), a.num("b")), a.num("l"), a.k()),
                       "series");
                 }});
    f.push_back({"hyp1f1k_integral", {"a", "b", "l", "k", "tol?"},
                 "1F1,k by its Euler integral", [](const EvalArgs& a) {
                   return from_estimate(hyp1f1k_integral(HypParams(a.num("a"), a.num("b")),
                                                         a.num("l"), a.k(), a.tol),
                                        "quadrature");
                 }});
    f.push_back({"hyp1f1k_kummer", {"a", "b", "l", "k"}, "1F1,k via Kummer's transform",
                 [](const EvalArgs& a) {
                   return from_estimate(
                       hyp1f1k_kummer(HypParams(a.num("a"), a.num("b")), a.num("l"), a.k()),
                       "series");
                 }});
    f.push_back({"hyp1f1k_deriv", {"a", "b", "l", "k"}, "derivative of 1F1,k in l",
                 [](const EvalArgs& a) {
                   return from_estimate(
                       hyp1f1k_deriv(HypParams(a.num("a"), a.num("b")), a.num("l"), a.k()),
                       "series");
                 }});
    f.push_back({"beta_hyp2", {"phi", "psi", "c", "a", "b", "k", "tol?"},
                 "two-variable beta with a 1F1,k factor", [](const EvalArgs& a) {
                   return from_estimate(
                       beta_hyp2(a.num("phi"), a.num("psi"), a.num("c"),
                                 HypParams(a.num("a"), a.num("b")), a.k(), a.tol),
                       "quadrature");
                 }});
    f.push_back({"gamma_hyp1", {"phi", "c", "a", "b", "k", "tol?"},
                 "gamma with a 1F1,k factor", [](const EvalArgs& a) {
                   return from_estimate(gamma_hyp1(a.num("phi"), a.num("c"),
                                                   HypParams(a.num("a"), a.num("b")),
                                                   a.k(), a.tol),
                                        "quadrature");
                 }});
    f.push_back({"sup_pi", {"n"}, "maximum of t_1...t_n on the simplex",
                 [](const EvalArgs& a) {
                   const std::size_t n = a.count("n");
                   if (n < 2 || n > 64) throw ConfigError("--n must be in 2..64");
                   return EvalResult{sup_pi(static_cast<int>(n)), 0.0, "closed_form",
                                     std::nullopt};
                 }});
    f.push_back({"beta_k_n", {"phi[]", "k"}, "n-variable k-beta, closed form",
                 [](const EvalArgs& a) {
                   return EvalResult{beta_k_n(phivec(a)), 0.0, "closed_form",
                                     std::nullopt};
                 }});
    f.push_back({"beta_k_n_quad", {"phi[]", "k", "method?"},
                 "n-variable k-beta by simplex integration", [](const EvalArgs& a) {
                   const PhiVec pv = phivec(a);
                   return from_quad(beta_k_n_quad(pv, a.eval_method(pv.size())));
                 }});
    f.push_back({"beta_ext_n", {"phi[]", "a", "k", "method?"},
                 "extended n-variable k-beta", [](const EvalArgs& a) {
                   const PhiVec pv = phivec(a);
                   return from_quad(beta_ext_n(pv, a.num("a"), a.eval_method(pv.size())));
                 }});
    f.push_back({"beta_ext_n_vec", {"phi[]", "a[]", "k", "coupling?", "method?"},
                 "extended n-variable k-beta, one parameter per coordinate",
                 [](const EvalArgs& a) {
                   const PhiVec pv = phivec(a);
                   ExtCoupling c = ExtCoupling::product;
                   if (a.coupling == "coordinate") {
                     c = ExtCoupling::coordinate;
                   } else if (a.coupling != "product") {
                     throw ConfigError("--coupling must be product or coordinate");
                   }
                   return from_quad(beta_ext_n_vec(pv, a.vec_n("a", pv.size()),
                                                   a.eval_method(pv.size()), c));
                 }});
    f.push_back({"gamma_kc", {"phi[]", "c[]", "k", "tol?"}, "orthant extended gamma",
                 [](const EvalArgs& a) {
                   const PhiVec pv = phivec(a);
                   return from_estimate(gamma_kc(pv, a.vec_n("c", pv.size()), a.tol),
                                        "quadrature");
                 }});
    f.push_back({"gamma_kc_hyp", {"phi[]", "c[]", "a[]", "b[]", "k", "tol?"},
                 "orthant gamma with 1F1,k factors", [](const EvalArgs& a) {
                   const PhiVec pv = phivec(a);
                   const std::size_t n = pv.size();
                   const auto av = a.vec_n("a", n), bv = a.vec_n("b", n);
                   std::vector<HypParams> hv;
                   for (std::size_t i = 0; i < n; ++i) hv.emplace_back(av[i], bv[i]);
                   return from_estimate(gamma_kc_hyp(pv, a.vec_n("c", n), hv, a.tol),
                                        "quadrature");
                 }});
    f.push_back({"beta_first", {"phi[]", "a", "b", "eta", "zeta", "k", "method?"},
                 "generalized beta of the first kind", [](const EvalArgs& a) {
                   const PhiVec pv = phivec(a);
                   const FirstKindParams fp{HypParams(a.num("a"), a.num("b")),
                                            a.num("eta"), a.num_or("zeta", 0.0)};
                   return from_quad(beta_first(pv, fp, a.eval_method(pv.size())));
                 }});
    f.push_back({"beta_second", {"phi[]", "p[]", "q[]", "eta[]", "zeta[]", "k", "method?"},
                 "generalized beta of the second kind", [](const EvalArgs& a) {
                   const PhiVec pv = phivec(a);
                   const std::size_t n = pv.size();
                   SecondKindParams sp{a.vec_n("p", n), a.vec_n("q", n),
                                       a.vec_n("eta", n),
                                       a.has("zeta") ? a.vec_n("zeta", n)
                                                     : std::vector<double>(n, 0.0)};
                   return from_quad(beta_second(pv, sp, a.eval_method(n)));
                 }});
    return f;
  }();
  return fns;
}

const FunctionInfo* find_function(const std::string& id) {
  for (const auto& f : functions()) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

// ---------------------------------------------------------------- reports

const char* family_name(ParamFamily f) {
  switch (f) {
    case ParamFamily::first: return "first";
    case ParamFamily::first_pair: return "first_pair";
    case ParamFamily::first_eta_moment: return "first_eta_moment";
    case ParamFamily::first_zeta_moment: return "first_zeta_moment";
    case ParamFamily::second: return "second";
    case ParamFamily::second_pair: return "second_pair";
    case ParamFamily::second_moment: return "second_moment";
  }
  return "?";
}

std::vector<std::string> family_params(ParamFamily f) {
  switch (f) {
    case ParamFamily::first: return {"k", "phi[]", "a", "b", "eta", "zeta"};
    case ParamFamily::first_pair: return {"k", "phi[]", "psi[]", "a", "b", "eta", "zeta"};
    case ParamFamily::first_eta_moment: return {"k", "phi[]", "a", "b", "z"};
    case ParamFamily::first_zeta_moment: return {"k", "phi[]", "a", "b", "eta", "z"};
    case ParamFamily::second: return {"k", "phi[]", "p[]", "q[]", "eta[]", "zeta[]"};
    case ParamFamily::second_pair:
      return {"k", "phi[]", "psi[]", "p[]", "q[]", "eta[]", "zeta[]"};
    case ParamFamily::second_moment: return {"k", "phi[]", "p[]", "q[]", "eta[]", "z[]"};
  }
  return {};
}

Json params_json(const TrialParams& tp) {
  Json j;
  j["n"] = tp.n();
  j["k"] = tp.k;
  j["phi"] = tp.phi;
  switch (tp.family) {
    case ParamFamily::first_pair:
      j["psi"] = tp.psi;
      [[fallthrough]];
    case ParamFamily::first:
      j["a"] = tp.a;
      j["b"] = tp.b;
      j["eta"] = tp.eta;
      j["zeta"] = tp.zeta;
      break;
    case ParamFamily::first_eta_moment:
      j["a"] = tp.a;
      j["b"] = tp.b;
      j["z"] = tp.z;
      break;
    case ParamFamily::first_zeta_moment:
      j["a"] = tp.a;
      j["b"] = tp.b;
      j["eta"] = tp.eta;
      j["z"] = tp.z;
      break;
    case ParamFamily::second_pair:
      j["psi"] = tp.psi;
      [[fallthrough]];
    case ParamFamily::second:
      j["p"] = tp.p;
      j["q"] = tp.q;
      j["eta"] = tp.eta_v;
      j["zeta"] = tp.zeta_v;
      break;
    case ParamFamily::second_moment:
      j["p"] = tp.p;
      j["q"] = tp.q;
      j["eta"] = tp.eta_v;
      j["z"] = tp.z_v;
      break;
  }
  j["mc_seed"] = tp.mc_seed;
  return j;
}

Json estimate_json(const Estimate& e) {
  return Json{{"value", e.value}, {"abs_err", e.abs_err}};
}

Json case_json(const TheoremCase& c) {
  Json j;
  j["theorem"] = c.theorem_id;
  j["params"] = params_json(c.params);
  j["lhs"] = estimate_json(c.lhs);
  j["rhs"] = estimate_json(c.rhs);
  j["verdict"] = to_string(c.verdict);
  j["margin"] = c.margin;
  Json links = Json::array();
  for (const auto& l : c.links) {
    Json lj;
    lj["name"] = l.name;
    lj["lhs"] = estimate_json(l.lhs);
    lj["rhs"] = estimate_json(l.rhs);
    lj["verdict"] = to_string(l.verdict);
    lj["margin"] = l.margin;
    if (l.informational) lj["informational"] = true;
    links.push_back(std::move(lj));
  }
  j["links"] = std::move(links);
  if (!c.diagnostic.empty()) j["diagnostic"] = c.diagnostic;
  return j;
}

Json aggregate_json(const SuiteReport& r) {
  std::size_t passes = 0;
  for (const auto& s : r.summaries) passes += s.passes;
  Json th = Json::array();
  for (const auto& s : r.summaries) {
    th.push_back(Json{{"theorem", s.theorem_id},
                      {"trials", s.trials},
                      {"passes", s.passes},
                      {"fails", s.fails},
                      {"inconclusives", s.inconclusives},
                      {"worst_margin", s.worst_margin},
                      {"median_margin", s.median_margin}});
  }
  Json agg;
  agg["trials"] = r.total_trials();
  agg["passes"] = passes;
  agg["fails"] = r.total_fails();
  agg["inconclusives"] = r.total_inconclusives();
  agg["verdict"] = to_string(r.verdict());
  agg["theorems"] = std::move(th);
  return Json{{"aggregate", std::move(agg)}};
}

// ---------------------------------------------------------------- commands

/// CLI11 validator body: empty when `s` is a valid number list.
std::string check_list(const std::string& s) {
  try {
    parse_number_list(s);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

Range parse_range(const std::string& s, const char* flag) {
  const std::vector<double> v = parse_number_list(s);
  if (v.size() == 1) return {v[0], v[0]};
  if (v.size() != 2) throw ConfigError(std::string(flag) + " takes lo,hi");
  return {v[0], v[1]};
}

struct VerifyArgs {
  std::string target = "all";
  std::size_t trials = 200;
  std::optional<std::string> seed;
  double slack = 1e-6;
  std::optional<double> tol;
  std::optional<std::string> k, n, phi_range, eta_range, zeta_range, a_range, gap_range,
      z_range;
  std::size_t mc_samples = 100000;
  bool force_mc = false;
  bool printed_shift = false;
  bool mutate = false;
  unsigned threads = 1;
  std::string format = "json";
  std::string output;
};

SuiteConfig build_suite_config(const VerifyArgs& v) {
  SuiteConfig cfg;
  cfg.trials = v.trials;
  cfg.seed = v.seed ? parse_seed(*v.seed) : default_seed();
  cfg.slack = v.slack;
  if (v.tol) cfg.tol = *v.tol;
  if (v.k) cfg.k_range = parse_range(*v.k, "--k");
  if (v.phi_range) cfg.phi_range = parse_range(*v.phi_range, "--phi-range");
  if (v.eta_range) cfg.eta_range = parse_range(*v.eta_range, "--eta-range");
  if (v.zeta_range) cfg.zeta_range = parse_range(*v.zeta_range, "--zeta-range");
  if (v.a_range) cfg.a_range = parse_range(*v.a_range, "--a-range");
  if (v.gap_range) cfg.gap_range = parse_range(*v.gap_range, "--gap-range");
  if (v.z_range) cfg.z_range = parse_range(*v.z_range, "--z-range");
  if (v.n) {
    cfg.n_values.clear();
    for (double x : parse_number_list(*v.n)) {
      if (x != std::floor(x) || x < 2 || x > static_cast<double>(kMaxDim)) {
        throw ConfigError("--n entries must be integers in 2.." +
                          std::to_string(kMaxDim));
      }
      cfg.n_values.push_back(static_cast<int>(x));
    }
  }
  cfg.mc_samples = v.mc_samples;
  cfg.force_mc = v.force_mc;
  cfg.printed_shift = v.printed_shift;
  cfg.mutate = v.mutate;
  cfg.threads = v.threads;
  if (v.target != "all") {
    find_theorem(v.target);
    cfg.theorems = {v.target};
  }
  cfg.validate();
  return cfg;
}

int cmd_verify(const VerifyArgs& v, std::ostream& out) {
  const SuiteConfig cfg = build_suite_config(v);
  const SuiteReport report = run_suite(cfg);
  std::ofstream file;
  std::ostream* dst = &out;
  if (!v.output.empty()) {
    file.open(v.output, std::ios::binary);
    if (!file) throw ConfigError("cannot open output file " + v.output);
    dst = &file;
  }
  if (v.format == "table") {
    write_report_table(report, *dst);
  } else {
    write_report_json(report, *dst);
  }
  dst->flush();
  if (!*dst) throw ConfigError("writing the report failed");
  return report.total_fails() > 0 ? 1 : 0;
}

int cmd_eval(const std::string& id, const EvalArgs& a, const std::string& format,
             std::ostream& out) {
  const FunctionInfo* f = find_function(id);
  if (f == nullptr) throw ConfigError("unknown function '" + id + "' (see `list`)");
  const EvalResult r = f->eval(a);
  if (format == "json") {
    Json j;
    j["function"] = id;
    j["value"] = r.value;
    j["abs_err"] = r.abs_err;
    j["method"] = r.method;
    j["evals"] = r.evals ? Json(*r.evals) : Json(nullptr);
    out << j.dump() << '\n';
  } else {
    out << "function  " << id << '\n'
        << "value     " << fmt(r.value) << '\n'
        << "abs_err   " << fmt(r.abs_err) << '\n'
        << "method    " << r.method << '\n'
        << "evals     " << (r.evals ? std::to_string(*r.evals) : "-") << '\n';
  }
  return 0;
}

void join(std::ostream& out, const std::vector<std::string>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
}

int cmd_list(const std::string& format, std::ostream& out) {
  if (format == "json") {
    Json arr = Json::array();
    for (const auto& f : functions()) {
      arr.push_back(Json{{"kind", "function"},
                         {"id", f.id},
                         {"params", f.params},
                         {"summary", f.summary}});
    }
    for (const auto& t : registry()) {
      arr.push_back(Json{{"kind", "theorem"},
                         {"id", t.id},
                         {"params", family_params(t.family)},
                         {"family", family_name(t.family)},
                         {"summary", t.summary}});
    }
    out << arr.dump(2) << '\n';
    return 0;
  }
  out << "functions:\n";
  for (const auto& f : functions()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "  %-18s", f.id.c_str());
    out << buf;
    join(out, f.params);
    out << '\n';
  }
  out << "theorems:\n";
  for (const auto& t : registry()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "  %-14s", t.id.c_str());
    out << buf << t.summary << "  [";
    join(out, family_params(t.family));
    out << "]\n";
  }
  return 0;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_number(text.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void write_report_json(const SuiteReport& report, std::ostream& out) {
  for (const auto& c : report.cases) out << case_json(c).dump() << '\n';
  out << aggregate_json(report).dump() << '\n';
}

void write_report_table(const SuiteReport& report, std::ostream& out) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %5s  %-12s %-34s %-34s %s\n", "theorem", "trial",
                "verdict", "lhs", "rhs", "margin");
  out << buf;
  std::map<std::string, std::size_t> seen;
  for (const auto& c : report.cases) {
    const std::size_t trial = seen[c.theorem_id]++;
    const std::string lhs = fmt(c.lhs.value) + " +- " + fmt(c.lhs.abs_err);
    const std::string rhs = fmt(c.rhs.value) + " +- " + fmt(c.rhs.abs_err);
    std::snprintf(buf, sizeof buf, "%-14s %5zu  %-12s %-34s %-34s %s", c.theorem_id.c_str(),
                  trial, to_string(c.verdict), lhs.c_str(), rhs.c_str(),
                  fmt(c.margin).c_str());
    out << buf;
    if (!c.diagnostic.empty()) out << "  (" << c.diagnostic << ")";
    out << '\n';
  }
  out << '\n';
  std::snprintf(buf, sizeof buf, "%-14s %6s %6s %6s %6s  %-12s %s\n", "theorem", "trials",
                "pass", "fail", "inc", "worst", "median");
  out << buf;
  for (const auto& s : report.summaries) {
    std::snprintf(buf, sizeof buf, "%-14s %6zu %6zu %6zu %6zu  %-12s %s\n",
                  s.theorem_id.c_str(), s.trials, s.passes, s.fails, s.inconclusives,
                  fmt(s.worst_margin).c_str(), fmt(s.median_margin).c_str());
    out << buf;
  }
  out << "verdict: " << to_string(report.verdict()) << " (" << report.total_fails()
      << " fail, " << report.total_inconclusives() << " inconclusive, "
      << report.total_trials() << " trials)\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"k-gamma and k-beta functions of several variables, with an inequality "
               "verification harness"};
  app.name("kbeta");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  const auto list_validator =
      CLI::Validator([](std::string& s) { return check_list(s); }, "LIST", "");
  const auto format_check = CLI::IsMember({"json", "table"});

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate one catalogued function");
  std::string fn;
  std::string eval_format = "table";
  EvalArgs ea;
  std::optional<std::string> eval_seed;
  eval->add_option("function", fn, "Function id (see `list`)")->required();
  const std::vector<std::string> names{"phi", "psi", "k", "a", "b", "c", "l", "m",
                                       "n",   "p",   "q", "eta", "zeta", "z"};
  std::map<std::string, std::string> values;
  for (const auto& name : names) {
    eval->add_option("--" + name, values[name], "number or comma-separated list")
        ->check(list_validator);
  }
  eval->add_option("--method", ea.method, "auto, det or mc")
      ->check(CLI::IsMember({"auto", "det", "mc"}));
  eval->add_option("--samples", ea.samples, "Monte Carlo samples")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000000}));
  eval->add_option("--seed", eval_seed, "Monte Carlo seed");
  eval->add_option("--tol", ea.tol, "quadrature tolerance")
      ->check(CLI::Range(1e-15, 1e-2));
  eval->add_option("--coupling", ea.coupling, "product or coordinate");
  eval->add_option("--format", eval_format, "json or table")->check(format_check);

  // verify
  auto* verify = app.add_subcommand("verify", "Run the inequality suite");
  VerifyArgs va;
  verify->add_option("theorem", va.target, "`all` or a theorem id");
  verify->add_option("--trials", va.trials, "trials per theorem");
  verify->add_option("--seed", va.seed, "suite seed (default $KBETA_SEED or 42)");
  verify->add_option("--slack", va.slack, "relative slack of a failing verdict");
  verify->add_option("--tol", va.tol, "quadrature tolerance");
  verify->add_option("--k", va.k, "k, or a range lo,hi")->check(list_validator);
  verify->add_option("--n", va.n, "dimensions, e.g. 2,3")->check(list_validator);
  verify->add_option("--phi-range", va.phi_range, "lo,hi")->check(list_validator);
  verify->add_option("--eta-range", va.eta_range, "lo,hi")->check(list_validator);
  verify->add_option("--zeta-range", va.zeta_range, "lo,hi")->check(list_validator);
  verify->add_option("--a-range", va.a_range, "lo,hi")->check(list_validator);
  verify->add_option("--gap-range", va.gap_range, "lo,hi")->check(list_validator);
  verify->add_option("--z-range", va.z_range, "lo,hi")->check(list_validator);
  verify->add_option("--mc-samples", va.mc_samples, "Monte Carlo samples");
  verify->add_flag("--force-mc", va.force_mc, "Monte Carlo for every simplex integral");
  verify->add_flag("--printed-shift", va.printed_shift,
                   "sandwich bound with the (a+1, b+1) shift");
  verify->add_flag("--mutate", va.mutate, "flip every inequality (control run)");
  verify->add_option("--threads", va.threads, "worker threads");
  verify->add_option("--format", va.format, "json or table")->check(format_check);
  verify->add_option("--output", va.output, "write the report to a file");

  // list
  auto* list = app.add_subcommand("list", "List functions and theorems");
  std::string list_format = "table";
  list->add_option("--format", list_format, "json or table")->check(format_check);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "kbeta: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*eval) {
      for (const auto& [name, value] : values) {
        if (eval->count("--" + name) > 0) ea.raw[name] = value;
      }
      ea.tol_set = eval->count("--tol") > 0;
      ea.seed = eval_seed ? parse_seed(*eval_seed) : default_seed();
      return cmd_eval(fn, ea, eval_format, out);
    }
    if (*verify) return cmd_verify(va, out);
    return cmd_list(list_format, out);
  } catch (const Error& e) {
    err << "kbeta: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "kbeta: unexpected error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace kbeta
