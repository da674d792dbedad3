#pragma once

// Run configuration: YAML grammar, validation, canonical echo and hash.
//
// Grammar: a mapping of sections; every section is a flat mapping from keys
// to scalars or flow/block lists of scalars. Top-level `study` is a scalar.
//
//   study: solution-rate        # kernel-rate | solution-rate | kernel-props | solver-validate
//   output:     dir, threads
//   grid:       dim, points, half_length
//   solver:     alpha, b, eta, s, horizon, dt, picard_tol, picard_max_iter,
//               dealias_fraction, snapshots, scheme_constant, enforce_l1_bound
//   family:     gamma (number or list), c_pert, base_shape, base_amplitude,
//               base_width, base_center, perturbation_shape, perturbation_amplitude,
//               perturbation_width, perturbation_center
//   sweep:      alphas, norms, eps, reference_check, max_refinements
//   kernel:     horizon, s, gradient_s, rel_tol, variants
//   properties: alphas, times, mass_half_length, envelope_alphas,
//               envelope_half_length, decay_alpha, decay_times,
//               holder_alpha, holder_eps, holder_t_max, holder_s,
//               fprime_alpha_max, fprime_t1, fprime_xi_max, fprime_points
//   validation: probe_alphas, probe_horizon, order_dt
//   tolerances: see Tolerances below
//
// Unknown sections and keys are errors. Missing keys take the defaults
// below, and to_yaml() prints every resolved value. With grid.dim = 2 the
// defaults change to eta = [1, 0], Sobolev indices 1.5 and gradient_s 2.5.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "errors.hpp"
#include "hs_distance.hpp"
#include "lab.hpp"

namespace fracheat {

enum class StudyKind { kernel_rate, solution_rate, kernel_props, solver_validate };

inline const char* to_string(StudyKind k) {
  switch (k) {
    case StudyKind::kernel_rate: return "kernel-rate";
    case StudyKind::solution_rate: return "solution-rate";
    case StudyKind::kernel_props: return "kernel-props";
    case StudyKind::solver_validate: return "solver-validate";
  }
  return "?";
}

inline StudyKind study_from_string(const std::string& s) {
  if (s == "kernel-rate") return StudyKind::kernel_rate;
  if (s == "solution-rate") return StudyKind::solution_rate;
  if (s == "kernel-props") return StudyKind::kernel_props;
  if (s == "solver-validate") return StudyKind::solver_validate;
  throw DomainError("unknown study '" + s + "' (expected kernel-rate, solution-rate, kernel-props or solver-validate)");
}

inline NormSpec norm_from_string(const std::string& s) {
  if (s == "sup") return {};
  static const std::regex re(R"(L(inf|[0-9]+(?:\.[0-9]+)?)L(inf|[0-9]+(?:\.[0-9]+)?))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw DomainError("unknown norm '" + s + "' (expected sup or L<p>L<q>, e.g. L2L2, LinfL4)");
  auto v = [](const std::string& t) { return t == "inf" ? infinity : std::stod(t); };
  return {v(m[1]), v(m[2])};
}

inline KernelDifference difference_from_string(const std::string& s) {
  if (s == "value") return KernelDifference::value;
  if (s == "gradient") return KernelDifference::gradient;
  throw DomainError("unknown kernel variant '" + s + "' (expected value or gradient)");
}

struct KernelRateOptions {
  double horizon = 1.0;
  double s = 1.0;
  double gradient_s = 2.0;
  double rel_tol = 1e-10;
  std::vector<KernelDifference> variants{KernelDifference::value};
};

struct PropertyOptions {
  std::vector<double> alphas{1.1, 1.5, 1.9, 2.0};
  std::vector<double> times{0.1, 1.0, 10.0};
  double mass_half_length = 64.0;
  std::vector<double> envelope_alphas{1.1, 1.5, 1.9};
  double envelope_half_length = 512.0;
  double decay_alpha = 1.5;
  std::vector<double> decay_times{0.25, 0.5, 1.0, 2.0, 4.0};
  double holder_alpha = 1.5;
  double holder_eps = 0.1;
  double holder_t_max = 1.0;
  double holder_s = 1.0;
  double fprime_alpha_max = 2.1;
  double fprime_t1 = 1.0;
  double fprime_xi_max = 50.0;
  int fprime_points = 20000;
};

struct ValidationOptions {
  std::vector<double> probe_alphas{1.3, 1.5, 1.7, 1.9, 1.99};
  double probe_horizon = 0.5;
  double order_dt = 1.0 / 64;
};

struct Tolerances {
  double kernel_slope_lo = 0.9;
  double kernel_slope_hi = 1.1;
  double sup_rate = 0.15;
  double l2l2_rate = 0.1;
  double mixed_rate = 0.15;
  double saturation_cap = 1.3;
  double mass = 1e-8;
  double positivity = 1e-12;
  double envelope_margin = 1e-9;
  double decay_exponent = 0.05;
  double semigroup = 1e-12;
  double holder_margin = 0.01;
  double fprime_stability = 0.01;
  double linear = 1e-10;
  double order = 1.9;
  double mean = 1e-10;
  double l1_growth = 1e-6;
  double probe_spread = 2.0;
};

struct RunConfig {
  StudyKind study = StudyKind::solution_rate;
  std::string output_dir = "out";
  int threads = 1;
  SolveConfig solver;
  DataFamilySpec family;
  std::vector<double> gammas{1.0};
  std::vector<double> alphas{1.80, 1.875, 1.90, 1.9375, 1.95, 1.96875, 1.975};
  std::vector<NormSpec> norms{NormSpec{}};
  double eps = 0.2;
  bool reference_check = true;
  int max_refinements = 3;
  KernelRateOptions kernel;
  PropertyOptions properties;
  ValidationOptions validation;
  Tolerances tol;

  RateStudySpec rate_study(double gamma) const {
    RateStudySpec s;
    s.family = family;
    s.family.gamma = gamma;
    s.alphas = alphas;
    s.solver = solver;
    s.norms = norms;
    s.eps = eps;
    s.reference_check = reference_check;
    s.max_refinements = max_refinements;
    s.threads = threads;
    return s;
  }
};

namespace detail {

inline std::string fmt_number(double v) {
  if (v == infinity) return ".inf";
  if (v == -infinity) return "-.inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T, class F>
std::string fmt_list(const std::vector<T>& v, F f) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + f(v[i]);
  return s + "]";
}

inline int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

/// Reads the keys of one flat section and rejects anything it was not asked for.
class SectionReader {
public:
  SectionReader(const YAML::Node& node, std::string name) : node_(node), name_(std::move(name)) {
    if (node_ && !node_.IsNull() && !node_.IsMap())
      throw ConfigError("section '" + name_ + "' must be a mapping", line_of(node_));
  }

  template <class T>
  void get(const std::string& key, T& out) {
    known_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const YAML::Node v = node_[key];
    if (!v) return;
    try {
      out = convert<T>(v);
    } catch (const YAML::Exception&) {
      throw ConfigError(name_ + "." + key + ": expected " + expected<T>(), line_of(v));
    } catch (const DomainError& e) {
      throw ConfigError(name_ + "." + key + ": " + e.what(), line_of(v));
    }
  }

  /// Numbers or lists of numbers.
  void get_scalar_or_list(const std::string& key, std::vector<double>& out) {
    known_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const YAML::Node v = node_[key];
    if (!v) return;
    try {
      out = v.IsSequence() ? v.as<std::vector<double>>() : std::vector<double>{v.as<double>()};
    } catch (const YAML::Exception&) {
      throw ConfigError(name_ + "." + key + ": expected a number or a list of numbers", line_of(v));
    }
  }

  void finish() const {
    if (!node_ || node_.IsNull()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!known_.count(key)) throw ConfigError("unknown key '" + name_ + "." + key + "'", line_of(kv.first));
    }
  }

private:
  template <class T>
  static T convert(const YAML::Node& v) {
    if constexpr (std::is_same_v<T, Profile>) {
      return profile_from_string(v.as<std::string>());
    } else if constexpr (std::is_same_v<T, std::vector<NormSpec>>) {
      std::vector<NormSpec> out;
      for (const auto& s : v.as<std::vector<std::string>>()) out.push_back(norm_from_string(s));
      return out;
    } else if constexpr (std::is_same_v<T, std::vector<KernelDifference>>) {
      std::vector<KernelDifference> out;
      for (const auto& s : v.as<std::vector<std::string>>()) out.push_back(difference_from_string(s));
      return out;
    } else if constexpr (std::is_same_v<T, std::optional<double>>) {
      return v.as<double>();
    } else {
      if (!v.IsScalar() && !std::is_same_v<T, std::vector<double>>) throw YAML::Exception(v.Mark(), "not a scalar");
      return v.as<T>();
    }
  }

  template <class T>
  static const char* expected() {
    if constexpr (std::is_same_v<T, int>) return "an integer";
    else if constexpr (std::is_same_v<T, bool>) return "true or false";
    else if constexpr (std::is_same_v<T, std::string> || std::is_same_v<T, Profile>) return "a string";
    else if constexpr (std::is_same_v<T, std::vector<double>>) return "a list of numbers";
    else if constexpr (std::is_same_v<T, std::vector<NormSpec>> || std::is_same_v<T, std::vector<KernelDifference>>)
      return "a list of strings";
    else return "a number";
  }

  YAML::Node node_;
  std::string name_;
  std::set<std::string> known_;
};

inline void require(bool ok, const std::string& field, double value, const std::string& constraint) {
  if (!ok) throw ConfigError(field + " = " + fmt_number(value) + ": " + constraint);
}

inline void require_each(const std::vector<double>& v, const std::string& field, bool (*pred)(double),
                         const std::string& constraint) {
  if (v.empty()) throw ConfigError(field + ": list must not be empty");
  for (double x : v) require(pred(x), field, x, constraint);
}

}  // namespace detail

/// Checks every field; messages name the field and the violated constraint.
inline void validate(const RunConfig& c) {
  using detail::require;
  using detail::require_each;
  const SolveConfig& s = c.solver;
  const Grid& g = s.grid;
  require(c.threads >= 1, "output.threads", c.threads, "must be >= 1");
  require(s.alpha > 1.0 && s.alpha <= 2.0, "solver.alpha", s.alpha, "must lie in (1, 2]");
  require(s.b >= 2, "solver.b", s.b, "must be an integer >= 2");
  if (static_cast<int>(s.eta.size()) != g.dim())
    throw ConfigError("solver.eta: needs one entry per dimension (grid.dim = " + std::to_string(g.dim()) + ")");
  require_each(s.eta, "solver.eta", [](double x) { return std::isfinite(x); }, "must be finite");
  require(s.s > 0.5 * g.dim(), "solver.s", s.s, "must exceed n/2");
  require(s.horizon > 0.0 && std::isfinite(s.horizon), "solver.horizon", s.horizon, "must be positive");
  require(s.dt > 0.0 && std::isfinite(s.dt), "solver.dt", s.dt, "must be positive");
  require(s.picard_tol > 0.0, "solver.picard_tol", s.picard_tol, "must be positive");
  require(s.picard_max_iter >= 1, "solver.picard_max_iter", s.picard_max_iter, "must be >= 1");
  const double f = s.effective_dealias();
  require(f > 0.0 && f <= 1.0, "solver.dealias_fraction", f, "must lie in (0, 1]");
  require(s.snapshots >= 2, "solver.snapshots", s.snapshots, "must be >= 2");
  require(s.scheme_constant > 0.0, "solver.scheme_constant", s.scheme_constant, "must be positive");

  require_each(c.gammas, "family.gamma", [](double x) { return x > 0.0 && std::isfinite(x); }, "must be > 0");
  require(c.family.c_pert >= 0.0 && std::isfinite(c.family.c_pert), "family.c_pert", c.family.c_pert, "must be >= 0");
  for (const auto* p : {&c.family.base, &c.family.perturbation}) {
    const std::string pre = p == &c.family.base ? "family.base_" : "family.perturbation_";
    require(std::isfinite(p->amplitude), pre + "amplitude", p->amplitude, "must be finite");
    require(p->width > 0.0 && std::isfinite(p->width), pre + "width", p->width, "must be positive");
    require(std::isfinite(p->center), pre + "center", p->center, "must be finite");
  }

  require(c.eps > 0.0 && c.eps < 1.0, "sweep.eps", c.eps, "must lie in (0, 1)");
  for (double a : c.alphas)
    require(a > 1.0 + c.eps && a < 2.0, "sweep.alphas", a, "must lie in (1 + eps, 2)");
  if (std::set<double>(c.alphas.begin(), c.alphas.end()).size() < 4)
    throw ConfigError("sweep.alphas: need at least 4 distinct values");
  if (c.norms.empty()) throw ConfigError("sweep.norms: list must not be empty");
  for (const NormSpec& n : c.norms) {
    require(n.p >= 1.0, "sweep.norms p", n.p, "must be >= 1");
    require(n.q >= 1.0, "sweep.norms q", n.q, "must be >= 1");
  }
  require(c.max_refinements >= 0, "sweep.max_refinements", c.max_refinements, "must be >= 0");

  const KernelRateOptions& k = c.kernel;
  require(k.horizon > 0.0 && std::isfinite(k.horizon), "kernel.horizon", k.horizon, "must be positive");
  require(k.s > 0.5 * g.dim(), "kernel.s", k.s, "must exceed n/2");
  require(k.gradient_s > 0.5 * g.dim() + 1.0, "kernel.gradient_s", k.gradient_s, "must exceed n/2 + 1");
  require(k.rel_tol > 0.0 && k.rel_tol < 1.0, "kernel.rel_tol", k.rel_tol, "must lie in (0, 1)");
  if (k.variants.empty()) throw ConfigError("kernel.variants: list must not be empty");

  const PropertyOptions& p = c.properties;
  auto in_range = [](double x) { return x > 1.0 && x <= 2.0; };
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  require_each(p.alphas, "properties.alphas", in_range, "must lie in (1, 2]");
  require_each(p.times, "properties.times", positive, "must be positive");
  require(p.mass_half_length > 0.0, "properties.mass_half_length", p.mass_half_length, "must be positive");
  require_each(p.envelope_alphas, "properties.envelope_alphas", in_range, "must lie in (1, 2]");
  require(p.envelope_half_length >= 4.0, "properties.envelope_half_length", p.envelope_half_length, "must be >= 4");
  require(in_range(p.decay_alpha), "properties.decay_alpha", p.decay_alpha, "must lie in (1, 2]");
  require_each(p.decay_times, "properties.decay_times", positive, "must be positive");
  if (std::set<double>(p.decay_times.begin(), p.decay_times.end()).size() < 3)
    throw ConfigError("properties.decay_times: need at least 3 distinct values");
  require(in_range(p.holder_alpha), "properties.holder_alpha", p.holder_alpha, "must lie in (1, 2]");
  require(positive(p.holder_eps), "properties.holder_eps", p.holder_eps, "must be positive");
  require(p.holder_t_max > p.holder_eps, "properties.holder_t_max", p.holder_t_max, "must exceed holder_eps");
  require(p.holder_s > 0.5 * g.dim(), "properties.holder_s", p.holder_s, "must exceed n/2");
  require(p.fprime_alpha_max >= 2.0, "properties.fprime_alpha_max", p.fprime_alpha_max, "must be >= 2");
  require(positive(p.fprime_t1), "properties.fprime_t1", p.fprime_t1, "must be positive");
  require(p.fprime_xi_max > 1.0, "properties.fprime_xi_max", p.fprime_xi_max, "must exceed 1");
  require(p.fprime_points >= 16, "properties.fprime_points", p.fprime_points, "must be >= 16");

  const ValidationOptions& v = c.validation;
  require_each(v.probe_alphas, "validation.probe_alphas", in_range, "must lie in (1, 2]");
  require(positive(v.probe_horizon), "validation.probe_horizon", v.probe_horizon, "must be positive");
  require(positive(v.order_dt), "validation.order_dt", v.order_dt, "must be positive");
}

/// Parses and validates a YAML document.
inline RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("parse error: " + e.msg, e.mark.line + 1);
  }
  RunConfig c;
  if (!root || root.IsNull()) throw ConfigError("empty configuration: at least 'study' is required");
  if (!root.IsMap()) throw ConfigError("configuration must be a mapping of sections", detail::line_of(root));

  static const std::set<std::string> sections{"study",  "output", "grid",       "solver",     "family",
                                              "sweep",  "kernel", "properties", "validation", "tolerances"};
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    if (!sections.count(key)) throw ConfigError("unknown section '" + key + "'", detail::line_of(kv.first));
  }
  if (!root["study"]) throw ConfigError("missing required key 'study'");
  try {
    c.study = study_from_string(root["study"].as<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("study: ") + e.what(), detail::line_of(root["study"]));
  }

  detail::SectionReader out(root["output"], "output");
  out.get("dir", c.output_dir);
  out.get("threads", c.threads);
  out.finish();

  int dim = 1, points = 1024;
  double half_length = 32.0;
  detail::SectionReader grid(root["grid"], "grid");
  grid.get("dim", dim);
  grid.get("points", points);
  grid.get("half_length", half_length);
  grid.finish();
  const int grid_line = root["grid"] ? detail::line_of(root["grid"]) : 0;
  if (dim != 1 && dim != 2) throw ConfigError("grid.dim = " + std::to_string(dim) + ": must be 1 or 2", grid_line);
  try {
    c.solver.grid = make_grid(dim, points, half_length);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("grid: ") + e.what(), grid_line);
  }
  if (dim == 2) {
    c.solver.eta = {1.0, 0.0};
    c.solver.s = c.kernel.s = c.properties.holder_s = 1.5;
    c.kernel.gradient_s = 2.5;
  }

  SolveConfig& s = c.solver;
  detail::SectionReader sol(root["solver"], "solver");
  sol.get("alpha", s.alpha);
  sol.get("b", s.b);
  sol.get_scalar_or_list("eta", s.eta);
  sol.get("s", s.s);
  sol.get("horizon", s.horizon);
  sol.get("dt", s.dt);
  sol.get("picard_tol", s.picard_tol);
  sol.get("picard_max_iter", s.picard_max_iter);
  sol.get("dealias_fraction", s.dealias_fraction);
  sol.get("snapshots", s.snapshots);
  sol.get("scheme_constant", s.scheme_constant);
  sol.get("enforce_l1_bound", s.enforce_l1_bound);
  sol.finish();

  DataFamilySpec& f = c.family;
  detail::SectionReader fam(root["family"], "family");
  fam.get_scalar_or_list("gamma", c.gammas);
  fam.get("c_pert", f.c_pert);
  fam.get("base_shape", f.base.shape);
  fam.get("base_amplitude", f.base.amplitude);
  fam.get("base_width", f.base.width);
  fam.get("base_center", f.base.center);
  fam.get("perturbation_shape", f.perturbation.shape);
  fam.get("perturbation_amplitude", f.perturbation.amplitude);
  fam.get("perturbation_width", f.perturbation.width);
  fam.get("perturbation_center", f.perturbation.center);
  fam.finish();
  if (!c.gammas.empty()) f.gamma = c.gammas.front();

  detail::SectionReader sw(root["sweep"], "sweep");
  sw.get("alphas", c.alphas);
  sw.get("norms", c.norms);
  sw.get("eps", c.eps);
  sw.get("reference_check", c.reference_check);
  sw.get("max_refinements", c.max_refinements);
  sw.finish();

  KernelRateOptions& k = c.kernel;
  detail::SectionReader ker(root["kernel"], "kernel");
  ker.get("horizon", k.horizon);
  ker.get("s", k.s);
  ker.get("gradient_s", k.gradient_s);
  ker.get("rel_tol", k.rel_tol);
  ker.get("variants", k.variants);
  ker.finish();

  PropertyOptions& p = c.properties;
  detail::SectionReader pr(root["properties"], "properties");
  pr.get("alphas", p.alphas);
  pr.get("times", p.times);
  pr.get("mass_half_length", p.mass_half_length);
  pr.get("envelope_alphas", p.envelope_alphas);
  pr.get("envelope_half_length", p.envelope_half_length);
  pr.get("decay_alpha", p.decay_alpha);
  pr.get("decay_times", p.decay_times);
  pr.get("holder_alpha", p.holder_alpha);
  pr.get("holder_eps", p.holder_eps);
  pr.get("holder_t_max", p.holder_t_max);
  pr.get("holder_s", p.holder_s);
  pr.get("fprime_alpha_max", p.fprime_alpha_max);
  pr.get("fprime_t1", p.fprime_t1);
  pr.get("fprime_xi_max", p.fprime_xi_max);
  pr.get("fprime_points", p.fprime_points);
  pr.finish();

  ValidationOptions& v = c.validation;
  detail::SectionReader va(root["validation"], "validation");
  va.get("probe_alphas", v.probe_alphas);
  va.get("probe_horizon", v.probe_horizon);
  va.get("order_dt", v.order_dt);
  va.finish();

  Tolerances& t = c.tol;
  detail::SectionReader to(root["tolerances"], "tolerances");
  to.get("kernel_slope_lo", t.kernel_slope_lo);
  to.get("kernel_slope_hi", t.kernel_slope_hi);
  to.get("sup_rate", t.sup_rate);
  to.get("l2l2_rate", t.l2l2_rate);
  to.get("mixed_rate", t.mixed_rate);
  to.get("saturation_cap", t.saturation_cap);
  to.get("mass", t.mass);
  to.get("positivity", t.positivity);
  to.get("envelope_margin", t.envelope_margin);
  to.get("decay_exponent", t.decay_exponent);
  to.get("semigroup", t.semigroup);
  to.get("holder_margin", t.holder_margin);
  to.get("fprime_stability", t.fprime_stability);
  to.get("linear", t.linear);
  to.get("order", t.order);
  to.get("mean", t.mean);
  to.get("l1_growth", t.l1_growth);
  to.get("probe_spread", t.probe_spread);
  to.finish();

  validate(c);
  return c;
}

/// Every resolved value in canonical order; parse_config(to_yaml(c)) == c.
/// Without the output section the text depends only on what affects results.
inline std::string to_yaml(const RunConfig& c, bool with_output = true) {
  using detail::fmt_number;
  auto num = [](double v) { return fmt_number(v); };
  auto str = [](const auto& v) { return std::string(to_string(v)); };
  auto nrm = [](const NormSpec& n) { return n.id(); };
  const SolveConfig& s = c.solver;
  const Tolerances& t = c.tol;
  const PropertyOptions& p = c.properties;
  std::ostringstream o;
  o << "study: " << to_string(c.study) << "\n";
  if (with_output) o << "output:\n  dir: \"" << c.output_dir << "\"\n  threads: " << c.threads << "\n";
  o << "grid:\n  dim: " << s.grid.dim() << "\n  points: " << s.grid.points_per_axis()
    << "\n  half_length: " << num(s.grid.half_length()) << "\n"
    << "solver:\n  alpha: " << num(s.alpha) << "\n  b: " << s.b << "\n  eta: " << detail::fmt_list(s.eta, num)
    << "\n  s: " << num(s.s) << "\n  horizon: " << num(s.horizon) << "\n  dt: " << num(s.dt)
    << "\n  picard_tol: " << num(s.picard_tol) << "\n  picard_max_iter: " << s.picard_max_iter
    << "\n  dealias_fraction: " << num(s.effective_dealias()) << "\n  snapshots: " << s.snapshots
    << "\n  scheme_constant: " << num(s.scheme_constant)
    << "\n  enforce_l1_bound: " << (s.enforce_l1_bound ? "true" : "false") << "\n"
    << "family:\n  gamma: " << detail::fmt_list(c.gammas, num) << "\n  c_pert: " << num(c.family.c_pert);
  for (const auto* q : {&c.family.base, &c.family.perturbation}) {
    const char* pre = q == &c.family.base ? "base_" : "perturbation_";
    o << "\n  " << pre << "shape: " << to_string(q->shape) << "\n  " << pre << "amplitude: " << num(q->amplitude)
      << "\n  " << pre << "width: " << num(q->width) << "\n  " << pre << "center: " << num(q->center);
  }
  o << "\nsweep:\n  alphas: " << detail::fmt_list(c.alphas, num) << "\n  norms: " << detail::fmt_list(c.norms, nrm)
    << "\n  eps: " << num(c.eps) << "\n  reference_check: " << (c.reference_check ? "true" : "false")
    << "\n  max_refinements: " << c.max_refinements << "\n"
    << "kernel:\n  horizon: " << num(c.kernel.horizon) << "\n  s: " << num(c.kernel.s)
    << "\n  gradient_s: " << num(c.kernel.gradient_s) << "\n  rel_tol: " << num(c.kernel.rel_tol)
    << "\n  variants: " << detail::fmt_list(c.kernel.variants, str) << "\n"
    << "properties:\n  alphas: " << detail::fmt_list(p.alphas, num) << "\n  times: " << detail::fmt_list(p.times, num)
    << "\n  mass_half_length: " << num(p.mass_half_length)
    << "\n  envelope_alphas: " << detail::fmt_list(p.envelope_alphas, num)
    << "\n  envelope_half_length: " << num(p.envelope_half_length) << "\n  decay_alpha: " << num(p.decay_alpha)
    << "\n  decay_times: " << detail::fmt_list(p.decay_times, num) << "\n  holder_alpha: " << num(p.holder_alpha)
    << "\n  holder_eps: " << num(p.holder_eps) << "\n  holder_t_max: " << num(p.holder_t_max)
    << "\n  holder_s: " << num(p.holder_s) << "\n  fprime_alpha_max: " << num(p.fprime_alpha_max)
    << "\n  fprime_t1: " << num(p.fprime_t1) << "\n  fprime_xi_max: " << num(p.fprime_xi_max)
    << "\n  fprime_points: " << p.fprime_points << "\n"
    << "validation:\n  probe_alphas: " << detail::fmt_list(c.validation.probe_alphas, num)
    << "\n  probe_horizon: " << num(c.validation.probe_horizon) << "\n  order_dt: " << num(c.validation.order_dt)
    << "\n"
    << "tolerances:\n  kernel_slope_lo: " << num(t.kernel_slope_lo) << "\n  kernel_slope_hi: " << num(t.kernel_slope_hi)
    << "\n  sup_rate: " << num(t.sup_rate) << "\n  l2l2_rate: " << num(t.l2l2_rate)
    << "\n  mixed_rate: " << num(t.mixed_rate) << "\n  saturation_cap: " << num(t.saturation_cap)
    << "\n  mass: " << num(t.mass) << "\n  positivity: " << num(t.positivity)
    << "\n  envelope_margin: " << num(t.envelope_margin) << "\n  decay_exponent: " << num(t.decay_exponent)
    << "\n  semigroup: " << num(t.semigroup) << "\n  holder_margin: " << num(t.holder_margin)
    << "\n  fprime_stability: " << num(t.fprime_stability) << "\n  linear: " << num(t.linear)
    << "\n  order: " << num(t.order) << "\n  mean: " << num(t.mean) << "\n  l1_growth: " << num(t.l1_growth)
    << "\n  probe_spread: " << num(t.probe_spread) << "\n";
  return o.str();
}

/// FNV-1a 64 of the canonical echo without the output section, as 16 hex
/// digits.
inline std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : to_yaml(c, false)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fracheat
