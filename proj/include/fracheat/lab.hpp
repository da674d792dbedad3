#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fracheat/errors.hpp"
#include "fracheat/grid.hpp"
#include "fracheat/norms.hpp"
#include "fracheat/parallel.hpp"
#include "fracheat/rate_fit.hpp"
#include "fracheat/solver.hpp"

namespace fracheat {

enum class Profile { gaussian, smoothed_bump, two_bump };

inline const char* to_string(Profile p) {
  switch (p) {
    case Profile::gaussian: return "gaussian";
    case Profile::smoothed_bump: return "smoothed_bump";
    case Profile::two_bump: return "two_bump";
  }
  return "?";
}

inline Profile profile_from_string(const std::string& s) {
  if (s == "gaussian") return Profile::gaussian;
  if (s == "smoothed_bump") return Profile::smoothed_bump;
  if (s == "two_bump") return Profile::two_bump;
  throw DomainError("unknown profile '" + s + "' (expected gaussian, smoothed_bump or two_bump)");
}

/// A closed-form profile centered at (center, 0) with peak `amplitude`.
///   gaussian:      A exp(-r^2 / w^2)
///   smoothed_bump: A exp(1 - 1 / (1 - r^2 / w^2)) for r < w, else 0
///   two_bump:      Gaussians of width w/2 at center -/+ w along axis 0
struct ProfileSpec {
  Profile shape = Profile::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;

  void validate(const char* what) const {
    if (!std::isfinite(amplitude)) throw DomainError(std::string(what) + ": amplitude must be finite");
    if (!(width > 0.0) || !std::isfinite(width)) throw DomainError(std::string(what) + ": width must be positive");
    if (!std::isfinite(center)) throw DomainError(std::string(what) + ": center must be finite");
  }

  double operator()(double x, double y) const {
    auto gauss = [&](double c, double w) { return std::exp(-((x - c) * (x - c) + y * y) / (w * w)); };
    switch (shape) {
      case Profile::gaussian: return amplitude * gauss(center, width);
      case Profile::smoothed_bump: {
        const double r2 = ((x - center) * (x - center) + y * y) / (width * width);
        return r2 < 1.0 ? amplitude * std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
      }
      case Profile::two_bump:
        return amplitude * (gauss(center - width, 0.5 * width) + gauss(center + width, 0.5 * width));
    }
    return 0.0;
  }

  Field sample(const Grid& g) const {
    if (g.dim() == 1) return Field::sample(g, [this](double x) { return (*this)(x, 0.0); });
    return Field::sample(g, [this](double x, double y) { return (*this)(x, y); });
  }
};

/// u_{0,alpha} = u_{0,2} + c_pert (2 - alpha)^gamma phi with phi the
/// perturbation profile scaled to unit grid maximum.
struct DataFamilySpec {
  ProfileSpec base{Profile::gaussian, 1.0, 1.0, -6.0};
  double gamma = 1.0;
  ProfileSpec perturbation{Profile::gaussian, 1.0, 2.0, 10.0};
  double c_pert = 0.25;

  void validate() const {
    base.validate("base");
    perturbation.validate("perturbation");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be > 0");
    if (!(c_pert >= 0.0) || !std::isfinite(c_pert)) throw DomainError("c_pert must be >= 0");
  }
};

struct DataFamily {
  Field base;  ///< u_{0,2}
  Field phi;   ///< unit-maximum perturbation
  std::map<double, Field> members;
};

inline DataFamily make_data_family(const DataFamilySpec& spec, const Grid& grid, const std::vector<double>& alphas) {
  spec.validate();
  const Field base = spec.base.sample(grid);
  const Field raw = spec.perturbation.sample(grid);
  const double peak = lp_norm(raw, infinity);
  if (!(peak > 0.0)) throw DomainError("make_data_family: perturbation profile vanishes on the grid");
  std::vector<complex> phi(raw.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = raw[i].real() / peak;
  DataFamily fam{base, Field(grid, phi, Representation::physical), {}};
  for (double a : alphas) {
    if (!(a > 1.0 && a <= 2.0)) throw DomainError("make_data_family: alpha must lie in (1, 2]");
    if (a == 2.0) {
      fam.members.emplace(a, base);
      continue;
    }
    const double delta = spec.c_pert * std::pow(2.0 - a, spec.gamma);
    std::vector<complex> v(base.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = base[i].real() + delta * phi[i].real();
    fam.members.emplace(a, Field(grid, std::move(v), Representation::physical));
  }
  return fam;
}

namespace detail {

inline void require_matching(const Trajectory& a, const Trajectory& b, const char* op) {
  if (a.times != b.times) throw DomainError(std::string(op) + ": snapshot schedules differ");
  if (a.states.empty() || !(a.states[0].grid() == b.states[0].grid()))
    throw DomainError(std::string(op) + ": grids differ");
}

inline Field difference(const Field& a, const Field& b) {
  std::vector<complex> d(a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
  return Field(a.grid(), std::move(d), Representation::physical);
}

}  // namespace detail

/// max over snapshots of the grid sup norm of u_a - u_2.
inline double sup_error(const Trajectory& a, const Trajectory& b) {
  detail::require_matching(a, b, "sup_error");
  double m = 0.0;
  for (std::size_t k = 0; k < a.states.size(); ++k)
    for (std::size_t i = 0; i < a.states[k].size(); ++i) m = std::max(m, std::abs(a.states[k][i] - b.states[k][i]));
  return m;
}

struct MixedNormValue {
  double value;
  bool outside_rate_range;  ///< q = 1 or q = inf: computable, but no rate claim applies
};

/// (int_0^T ||u_a(t) - u_2(t)||_{L^q}^p dt)^{1/p} by the trapezoid rule over
/// snapshots; p = inf takes the max over snapshots.
inline MixedNormValue mixed_norm_error(const Trajectory& a, const Trajectory& b, double p, double q) {
  detail::require_matching(a, b, "mixed_norm_error");
  if (!(p >= 1.0) || !(q >= 1.0)) throw DomainError("mixed_norm_error: p and q must lie in [1, inf]");
  std::vector<double> g(a.states.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = lp_norm(detail::difference(a.states[k], b.states[k]), q);
  double value = 0.0;
  if (p == infinity) {
    value = *std::max_element(g.begin(), g.end());
  } else {
    for (std::size_t k = 1; k < g.size(); ++k)
      value += 0.5 * (a.times[k] - a.times[k - 1]) * (std::pow(g[k], p) + std::pow(g[k - 1], p));
    value = std::pow(value, 1.0 / p);
  }
  return {value, q == 1.0 || q == infinity};
}

/// An error functional of a study: L^p in time of L^q in space, with
/// p = q = inf the sup norm.
struct NormSpec {
  double p = infinity;
  double q = infinity;

  bool is_sup() const { return p == infinity && q == infinity; }

  std::string id() const {
    if (is_sup()) return "sup";
    auto f = [](double v) {
      if (v == infinity) return std::string("inf");
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", v);
      return std::string(buf);
    };
    return "L" + f(p) + "L" + f(q);
  }

  double predicted_slope(double gamma) const {
    const double r = std::min(gamma, 1.0);
    return q == infinity ? r : r * (1.0 - 1.0 / q);
  }
};

struct RateStudySpec {
  DataFamilySpec family;
  std::vector<double> alphas{1.80, 1.875, 1.90, 1.9375, 1.95, 1.96875, 1.975};
  SolveConfig solver;  ///< template; alpha is overwritten per member
  std::vector<NormSpec> norms{NormSpec{}};
  double eps = 0.2;
  bool reference_check = true;
  int max_refinements = 3;
  int threads = 1;
};

struct NormResult {
  NormSpec norm;
  std::vector<double> errors;  ///< per alpha, same order as StudyResult::alphas
  RateFit fit;
  double predicted;
  bool monotone;  ///< nonincreasing toward alpha = 2 within a 5% band
  double floor;   ///< discretization floor from the reference check
};

struct StudyResult {
  std::vector<double> alphas;  ///< ascending, alpha = 2 excluded
  double gamma;
  std::vector<NormResult> norms;
  std::vector<int> segments;   ///< Picard segments used per alpha
  int reference_segments = 0;
  double dt_used;
  int refinements = 0;
  bool floor_resolved = true;
  std::vector<std::string> warnings;
  std::vector<Trajectory> trajectories;  ///< per alpha
  Trajectory reference;                  ///< alpha = 2
};

namespace detail {

inline double norm_error(const NormSpec& n, const Trajectory& a, const Trajectory& b) {
  return n.is_sup() ? sup_error(a, b) : mixed_norm_error(a, b, n.p, n.q).value;
}

}  // namespace detail

/// Solves every family member and the alpha = 2 reference with one grid, dt
/// and snapshot schedule, then fits each error functional against 2 - alpha.
/// A dt/4 rerun of the reference measures the time-discretization floor; if it
/// is not 10x below the smallest error in every norm, dt is halved and the
/// study repeated (at most max_refinements times).
inline StudyResult run_rate_study(const RateStudySpec& spec) {
  spec.family.validate();
  spec.solver.validate();
  if (!(spec.eps > 0.0 && spec.eps < 1.0)) throw DomainError("run_rate_study: eps must lie in (0, 1)");
  if (spec.norms.empty()) throw DomainError("run_rate_study: no error functionals requested");
  std::vector<double> alphas;
  for (double a : spec.alphas) {
    if (a == 2.0) continue;
    if (!(a > 1.0 + spec.eps && a < 2.0))
      throw DomainError("run_rate_study: sweep alpha " + std::to_string(a) + " outside (1 + eps, 2)");
    alphas.push_back(a);
  }
  std::sort(alphas.begin(), alphas.end());
  if (std::set<double>(alphas.begin(), alphas.end()).size() < 4 || std::adjacent_find(alphas.begin(), alphas.end()) != alphas.end())
    throw DomainError("run_rate_study: need at least 4 distinct sweep values in (1 + eps, 2)");

  std::vector<double> all = alphas;
  all.push_back(2.0);
  const Grid& grid = spec.solver.grid;
  const DataFamily fam = make_data_family(spec.family, grid, all);

  StudyResult out;
  out.alphas = alphas;
  out.gamma = spec.family.gamma;
  SolveConfig cfg = spec.solver;
  for (int attempt = 0;; ++attempt) {
    std::vector<Trajectory> trajs(all.size());
    parallel_for(all.size(), spec.threads, [&](std::size_t i) {
      SolveConfig c = cfg;
      c.alpha = all[i];
      try {
        trajs[i] = solve(fam.members.at(all[i]), c);
      } catch (const Error& e) {
        throw Error("run_rate_study: solve failed at alpha = " + std::to_string(all[i]) + ": " + e.what());
      }
    });
    out.reference = std::move(trajs.back());
    trajs.pop_back();
    out.trajectories = std::move(trajs);
    out.dt_used = cfg.dt;
    out.refinements = attempt;

    out.norms.clear();
    for (const NormSpec& n : spec.norms) {
      NormResult r{n, {}, {}, n.predicted_slope(spec.family.gamma), true, 0.0};
      for (const auto& tr : out.trajectories) r.errors.push_back(detail::norm_error(n, tr, out.reference));
      out.norms.push_back(std::move(r));
    }
    if (!spec.reference_check) break;

    SolveConfig fine = cfg;
    fine.alpha = 2.0;
    fine.dt = cfg.dt / 4;
    const Trajectory ref_fine = solve(fam.base, fine);
    bool resolved = true;
    for (NormResult& r : out.norms) {
      r.floor = detail::norm_error(r.norm, out.reference, ref_fine);
      const double smallest = *std::min_element(r.errors.begin(), r.errors.end());
      resolved = resolved && r.floor * 10.0 <= smallest;
    }
    out.floor_resolved = resolved;
    if (resolved || attempt >= spec.max_refinements) break;
    cfg.dt /= 2;
  }
  if (!out.floor_resolved)
    out.warnings.push_back("discretization floor not 10x below the smallest error after " +
                           std::to_string(out.refinements) + " refinements");

  for (NormResult& r : out.norms) {
    r.fit = fit_rate([&] {
      std::vector<double> x;
      for (double a : alphas) x.push_back(2.0 - a);
      return x;
    }(), r.errors, r.norm.id());
    // errors are ordered by ascending alpha, i.e. toward alpha = 2
    for (std::size_t i = 1; i < r.errors.size(); ++i)
      r.monotone = r.monotone && r.errors[i] <= r.errors[i - 1] * 1.05;
    if (r.norm.q == 1.0 || (r.norm.q == infinity && !r.norm.is_sup()))
      out.warnings.push_back(r.norm.id() + ": q outside (1, inf), no rate prediction applies");
  }
  for (const auto& tr : out.trajectories) out.segments.push_back(static_cast<int>(tr.segmentation.size()));
  out.reference_segments = static_cast<int>(out.reference.segmentation.size());
  const int most = std::max(out.reference_segments, *std::max_element(out.segments.begin(), out.segments.end()));
  if (most > 20)
    out.warnings.push_back("existence-time segmentation uses " + std::to_string(most) +
                           " segments (> 20): data are large relative to the contraction hypothesis");
  return out;
}

}  // namespace fracheat
