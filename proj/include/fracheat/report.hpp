#pragma once

// Study orchestration and result artifacts.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "hs_distance.hpp"
#include "kernel.hpp"
#include "lab.hpp"
#include "solver.hpp"

namespace fracheat {

/// One asserted quantity. Passes iff lo <= measured <= hi (and measured is
/// not NaN); target and tolerance are set for "target +/- tolerance" checks.
struct CheckResult {
  std::string name;
  double measured;
  double lo;
  double hi;
  std::optional<double> target;
  std::optional<double> tolerance;
  std::string note;
  bool passed;
};

inline CheckResult check_range(std::string name, double measured, double lo, double hi, std::string note = {}) {
  const bool ok = !std::isnan(measured) && measured >= lo && measured <= hi;
  return {std::move(name), measured, lo, hi, std::nullopt, std::nullopt, std::move(note), ok};
}

inline CheckResult check_within(std::string name, double measured, double target, double tol, std::string note = {}) {
  CheckResult c = check_range(std::move(name), measured, target - tol, target + tol, std::move(note));
  c.target = target;
  c.tolerance = tol;
  return c;
}

inline CheckResult check_at_most(std::string name, double measured, double bound, std::string note = {}) {
  return check_range(std::move(name), measured, -infinity, bound, std::move(note));
}

inline CheckResult check_at_least(std::string name, double measured, double bound, std::string note = {}) {
  return check_range(std::move(name), measured, bound, infinity, std::move(note));
}

struct DataTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct FitRecord {
  std::string name;     ///< also the plot-data file stem
  std::string x_label;  ///< abscissa, e.g. "2-alpha" or "t"
  RateFit fit;
  double predicted;     ///< NaN when no exponent is predicted
};

struct StudyReport {
  StudyKind study = StudyKind::solution_rate;
  std::string config_hash;
  bool complete = true;
  std::string error;
  std::vector<CheckResult> checks;
  std::vector<FitRecord> fits;
  std::vector<DataTable> tables;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, double>> timings;  ///< seconds

  bool passed(bool strict = false) const {
    if (!complete) return false;
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !(strict && !warnings.empty());
  }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

template <class F>
auto timed(StudyReport& rep, const std::string& what, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  auto finish = [&] {
    rep.timings.emplace_back(what, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  };
  if constexpr (std::is_void_v<decltype(f())>) {
    f();
    finish();
  } else {
    auto r = f();
    finish();
    return r;
  }
}

inline std::string gamma_tag(double g) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "gamma_%g", g);
  return buf;
}

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// kernel-rate

inline void kernel_rate_study(const RunConfig& c, StudyReport& rep) {
  QuadratureSpec quad;
  quad.dim = c.solver.grid.dim();
  quad.rel_tol = c.kernel.rel_tol;
  DataTable table{"kernel_rate", {"alpha", "2-alpha"}, {}};
  std::vector<KernelSweep> sweeps;
  for (KernelDifference d : c.kernel.variants) {
    const double s = d == KernelDifference::value ? c.kernel.s : c.kernel.gradient_s;
    const KernelSweep sw = timed(rep, std::string("sweep ") + to_string(d), [&] {
      return kernel_rate_sweep(c.alphas, c.kernel.horizon, s, quad, d, c.threads);
    });
    sweeps.push_back(sw);
    table.columns.push_back(sw.fit.norm_id);
    rep.fits.push_back({sw.fit.norm_id, "2-alpha", sw.fit, 1.0});
    rep.checks.push_back(check_range(sw.fit.norm_id + " slope", sw.fit.slope, c.tol.kernel_slope_lo,
                                     c.tol.kernel_slope_hi, "s = " + g17(s) + ", predicted rate 1"));
  }
  for (const KernelSweep& sw : sweeps) table.columns.push_back("t_" + sw.fit.norm_id);
  const std::vector<double>& alphas = sweeps.front().alphas;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    std::vector<double> row{alphas[i], 2.0 - alphas[i]};
    for (const auto& sw : sweeps) row.push_back(sw.sups[i].value);
    for (const auto& sw : sweeps) row.push_back(sw.sups[i].time);
    table.rows.push_back(std::move(row));
  }
  rep.tables.push_back(std::move(table));
}

// ---------------------------------------------------------------------------
// solution-rate

inline double rate_tolerance(const RunConfig& c, const NormSpec& n) {
  if (n.is_sup()) return c.tol.sup_rate;
  if (n.p == 2.0 && n.q == 2.0) return c.tol.l2l2_rate;
  return c.tol.mixed_rate;
}

inline void solution_rate_study(const RunConfig& c, StudyReport& rep) {
  for (double gamma : c.gammas) {
    const std::string tag = gamma_tag(gamma);
    const StudyResult r = timed(rep, "rate study " + tag, [&] { return run_rate_study(c.rate_study(gamma)); });
    DataTable table{"errors_" + tag, {"alpha", "2-alpha"}, {}};
    for (const NormResult& n : r.norms) table.columns.push_back(n.norm.id());
    for (std::size_t i = 0; i < r.alphas.size(); ++i) {
      std::vector<double> row{r.alphas[i], 2.0 - r.alphas[i]};
      for (const NormResult& n : r.norms) row.push_back(n.errors[i]);
      table.rows.push_back(std::move(row));
    }
    rep.tables.push_back(std::move(table));

    for (const NormResult& n : r.norms) {
      const std::string id = n.norm.id() + " " + tag;
      const bool claim = n.norm.is_sup() || (n.norm.q > 1.0 && n.norm.q < infinity);
      rep.fits.push_back({n.norm.id() + "_" + tag, "2-alpha", n.fit,
                          claim ? n.predicted : std::numeric_limits<double>::quiet_NaN()});
      if (claim) rep.checks.push_back(check_within(id + " slope", n.fit.slope, n.predicted, rate_tolerance(c, n.norm)));
      if (n.norm.is_sup() && gamma > 1.0)
        rep.checks.push_back(check_at_most(id + " saturation", n.fit.slope, c.tol.saturation_cap,
                                           "rate of the data exceeds 1; solution rate must stay near 1"));
      double worst = 0.0;
      for (std::size_t i = 1; i < n.errors.size(); ++i) worst = std::max(worst, n.errors[i] / n.errors[i - 1]);
      rep.checks.push_back(check_at_most(id + " monotone", worst, 1.05,
                                         "largest ratio of consecutive errors as alpha increases"));
    }
    for (const std::string& w : r.warnings) rep.warnings.push_back(tag + ": " + w);
  }
}

// ---------------------------------------------------------------------------
// kernel-props

/// Smallest power-of-two grid on [-L, L)^n whose symbol tail at time t is
/// below the resolution guard.
inline Grid resolved_grid(int dim, double half_length, double alpha, double t) {
  const int cap = dim == 1 ? (1 << 22) : (1 << 12);
  for (int n = 64; n <= cap; n *= 2) {
    const Grid g = make_grid(dim, n, half_length);
    if (symbol({alpha, t}, g.max_axis_wavenumber()) < kernel_resolution_guard) return g;
  }
  throw UnderResolvedKernel("resolved_grid: no grid up to " + std::to_string(cap) +
                            " points per axis resolves alpha = " + g17(alpha) + ", t = " + g17(t));
}

/// Sum over periodic images of (1 + |x + 2Lk|)^{-(n + alpha)}.
inline double periodic_envelope(const Grid& g, std::size_t flat, double alpha) {
  const int K = g.dim() == 1 ? 32 : 6;
  const double L2 = 2.0 * g.half_length(), e = g.dim() + alpha;
  double sum = 0.0;
  if (g.dim() == 1) {
    const double x = g.x(0, flat);
    for (int k = -K; k <= K; ++k) sum += std::pow(1.0 + std::abs(x + k * L2), -e);
  } else {
    const double x = g.x(0, flat), y = g.x(1, flat);
    for (int i = -K; i <= K; ++i)
      for (int j = -K; j <= K; ++j) sum += std::pow(1.0 + std::hypot(x + i * L2, y + j * L2), -e);
  }
  return sum;
}

inline Field subtract(const Field& a, const Field& b) {
  std::vector<complex> d(a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
  return Field(a.grid(), std::move(d), a.representation());
}

inline std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  v.back() = hi;
  return v;
}

inline void kernel_props_study(const RunConfig& c, StudyReport& rep) {
  const PropertyOptions& p = c.properties;
  const int dim = c.solver.grid.dim();

  timed(rep, "mass and positivity", [&] {
    DataTable t{"kernel_mass", {"alpha", "t", "points", "mass_error", "min_over_peak"}, {}};
    double worst_mass = 0.0, worst_min = infinity;
    for (double a : p.alphas)
      for (double time : p.times) {
        const Grid g = resolved_grid(dim, p.mass_half_length, a, time);
        const Field k = kernel_field({a, time}, g);
        const double err = std::abs(lp_norm(k, 1.0) - 1.0);
        double lo = infinity;
        for (const auto& v : k.values()) lo = std::min(lo, v.real());
        const double rel = lo / lp_norm(k, infinity);
        worst_mass = std::max(worst_mass, err);
        worst_min = std::min(worst_min, rel);
        t.rows.push_back({a, time, static_cast<double>(g.points_per_axis()), err, rel});
      }
    rep.checks.push_back(check_at_most("kernel mass", worst_mass, c.tol.mass, "max |mass - 1| over alphas and times"));
    rep.checks.push_back(check_at_least("kernel positivity", worst_min, -c.tol.positivity, "min value / peak"));
    rep.tables.push_back(std::move(t));
  });

  timed(rep, "decay envelope", [&] {
    DataTable t{"kernel_envelope", {"alpha", "points", "fitted_C", "verified_ratio", "edge_ratio"}, {}};
    double worst = 0.0;
    const double L = p.envelope_half_length;
    for (double a : p.envelope_alphas) {
      const Grid g = resolved_grid(dim, L, a, 1.0);
      const Field k = kernel_field({a, 1.0}, g);
      std::vector<double> ratio(g.size(), 0.0);
      double C = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g.x_norm(i);
        if (r < 1.0 || r > 0.5 * L) continue;
        ratio[i] = k[i].real() / periodic_envelope(g, i, a);
        if (r <= 0.25 * L) C = std::max(C, ratio[i]);
      }
      double verified = 0.0, edge = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g.x_norm(i);
        if (r < 1.0 || r > 0.5 * L) continue;
        verified = std::max(verified, ratio[i] / C);
        if (r > 0.45 * L) edge = std::max(edge, ratio[i] / C);
      }
      worst = std::max(worst, verified);
      t.rows.push_back({a, static_cast<double>(g.points_per_axis()), C, verified, edge});
    }
    rep.checks.push_back(check_at_most("kernel decay envelope", worst, 1.0 + c.tol.envelope_margin,
                                       "C fitted on 1 <= |x| <= L/4, ratio to C(1+|x|)^-(n+alpha) "
                                       "(periodic images summed) verified on 1 <= |x| <= L/2"));
    rep.tables.push_back(std::move(t));
  });

  timed(rep, "Lp time decay", [&] {
    const double a = p.decay_alpha;
    std::vector<double> times = p.decay_times;
    std::sort(times.begin(), times.end());
    const Grid g = resolved_grid(dim, p.envelope_half_length, a, times.front());
    DataTable t{"kernel_lp_decay", {"t", "L1", "L2", "Linf"}, {}};
    std::vector<std::vector<double>> norms(3);
    const double ps[3] = {1.0, 2.0, infinity};
    for (double time : times) {
      const Field k = kernel_field({a, time}, g);
      std::vector<double> row{time};
      for (int j = 0; j < 3; ++j) {
        norms[j].push_back(lp_norm(k, ps[j]));
        row.push_back(norms[j].back());
      }
      t.rows.push_back(std::move(row));
    }
    const char* ids[3] = {"kernel_L1_decay", "kernel_L2_decay", "kernel_Linf_decay"};
    for (int j = 0; j < 3; ++j) {
      const double predicted = -(dim / a) * (ps[j] == infinity ? 1.0 : 1.0 - 1.0 / ps[j]);
      const RateFit f = fit_rate(times, norms[j], ids[j]);
      rep.fits.push_back({ids[j], "t", f, predicted});
      rep.checks.push_back(check_within(std::string(ids[j]) + " exponent", f.slope, predicted, c.tol.decay_exponent,
                                        "alpha = " + g17(a)));
    }
    rep.tables.push_back(std::move(t));
  });

  timed(rep, "semigroup law", [&] {
    const Field phi = forward_transform(c.family.base.sample(c.solver.grid));
    const double peak = lp_norm(inverse_transform(phi), infinity);
    double worst = 0.0;
    for (double a : p.alphas) {
      const Field two = apply_semigroup(apply_semigroup(phi, {a, 0.3}), {a, 0.7});
      const Field one = apply_semigroup(phi, {a, 1.0});
      worst = std::max(worst, lp_norm(inverse_transform(subtract(two, one)), infinity) / peak);
    }
    rep.checks.push_back(check_at_most("semigroup law", worst, c.tol.semigroup, "sup |P(0.7)P(0.3)u - P(1)u| / sup |u|"));
  });

  timed(rep, "time continuity", [&] {
    const double a = p.holder_alpha, s = p.holder_s;
    const Field phi = forward_transform(c.family.base.sample(c.solver.grid));
    const double phi_norm = hs_norm(phi, s);
    auto ratio = [&](double t1, double t2) {
      const Field d = subtract(apply_semigroup(phi, {a, t1}), apply_semigroup(phi, {a, t2}));
      return hs_norm(d, s) / (std::sqrt(std::abs(t1 - t2)) * phi_norm);
    };
    const std::vector<double> coarse = geometric(p.holder_eps, p.holder_t_max, 8);
    double C = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i)
      for (std::size_t j = i + 1; j < coarse.size(); ++j) C = std::max(C, ratio(coarse[i], coarse[j]));
    DataTable t{"kernel_time_continuity", {"t1", "t2", "ratio_over_C"}, {}};
    double worst = 0.0;
    auto verify = [&](double t1, double t2) {
      const double r = ratio(t1, t2) / C;
      worst = std::max(worst, r);
      t.rows.push_back({t1, t2, r});
    };
    const std::vector<double> fine = geometric(p.holder_eps, p.holder_t_max, 25);
    for (std::size_t i = 0; i < fine.size(); ++i)
      for (std::size_t j = i + 1; j < fine.size(); ++j) verify(fine[i], fine[j]);
    for (double t1 : coarse)
      for (int k = 1; k <= 8; ++k)
        if (t1 + std::pow(10.0, -k) <= p.holder_t_max) verify(t1, t1 + std::pow(10.0, -k));
    rep.checks.push_back(check_at_most("time continuity", worst, 1.0 + c.tol.holder_margin,
                                       "C = " + g17(C) + " fitted on 8 times in [eps, t_max]; " +
                                           "max of ||(P(t1)-P(t2))u||_Hs / (C |t1-t2|^1/2 ||u||_Hs) on the verification sample"));
    rep.tables.push_back(std::move(t));
  });

  timed(rep, "fprime bound", [&] {
    auto xi_grid = [&](int n) {
      std::vector<double> v(n);
      for (int i = 0; i < n; ++i) v[i] = p.fprime_xi_max * i / (n - 1);
      v.push_back(1.0);
      return v;
    };
    const FprimeBound b = fprime_bound_check(p.fprime_alpha_max, p.fprime_t1, xi_grid(p.fprime_points));
    const FprimeBound f = fprime_bound_check(p.fprime_alpha_max, p.fprime_t1, xi_grid(4 * p.fprime_points));
    const double at_zero = std::max(fprime_sup_over_alpha(0.0, p.fprime_t1, 1.0, p.fprime_alpha_max),
                                    fprime_sup_over_alpha(1.0, p.fprime_t1, 1.0, p.fprime_alpha_max));
    rep.checks.push_back(check_range("fprime sup finite", b.constant, 0.0, std::numeric_limits<double>::max(),
                                     "sup over xi, alpha of |f'| / t1"));
    rep.checks.push_back(check_at_most("fprime zero at xi in {0, 1}", at_zero, 0.0));
    rep.checks.push_back(check_at_most("fprime refinement stability", std::abs(f.constant / b.constant - 1.0),
                                       c.tol.fprime_stability, "relative change of sup/t1 under 4x xi refinement"));
    DataTable t{"fprime", {"points", "sup_small", "xi_small", "sup_large", "xi_large", "constant"}, {}};
    t.rows.push_back({static_cast<double>(p.fprime_points), b.sup_small, b.xi_small, b.sup_large, b.xi_large, b.constant});
    t.rows.push_back({4.0 * p.fprime_points, f.sup_small, f.xi_small, f.sup_large, f.xi_large, f.constant});
    rep.tables.push_back(std::move(t));
  });
}

// ---------------------------------------------------------------------------
// solver-validate

inline bool same_bytes(const Trajectory& a, const Trajectory& b) {
  if (a.times != b.times || a.states.size() != b.states.size()) return false;
  for (std::size_t k = 0; k < a.states.size(); ++k)
    if (std::memcmp(a.states[k].values().data(), b.states[k].values().data(), a.states[k].size() * sizeof(complex)))
      return false;
  return true;
}

inline void solver_validate_study(const RunConfig& c, StudyReport& rep) {
  SolveConfig base = c.solver;
  base.enforce_l1_bound = false;
  const Grid& g = base.grid;
  const Field u0 = c.family.base.sample(g);
  const double peak = lp_norm(u0, infinity);

  timed(rep, "linear exactness", [&] {
    SolveConfig lin = base;
    lin.eta.assign(g.dim(), 0.0);
    const Trajectory tr = solve(u0, lin);
    double dev = 0.0;
    for (std::size_t k = 1; k < tr.times.size(); ++k) {
      const Field exact = apply_semigroup(u0, {lin.alpha, tr.times[k]});
      dev = std::max(dev, lp_norm(subtract(tr.states[k], exact), infinity));
    }
    rep.checks.push_back(check_at_most("linear exactness", dev / peak, c.tol.linear, "eta = 0 against the semigroup, sup-relative"));
  });

  const Trajectory nonlinear = timed(rep, "self-convergence", [&] {
    SolveConfig o = base;
    std::vector<Trajectory> runs;
    for (int k = 0; k < 3; ++k) {
      o.dt = c.validation.order_dt / (1 << k);
      runs.push_back(solve(u0, o));
    }
    const double e1 = sup_error(runs[0], runs[1]), e2 = sup_error(runs[1], runs[2]);
    const double order = std::log2(e1 / e2);
    rep.checks.push_back(check_at_least("self-convergence order", order, c.tol.order,
                                        "log2 of successive differences under dt halving from dt = " + g17(c.validation.order_dt)));
    DataTable t{"self_convergence", {"dt", "step", "sup_diff_to_half_dt"}, {}};
    t.rows.push_back({c.validation.order_dt, runs[0].step, e1});
    t.rows.push_back({c.validation.order_dt / 2, runs[1].step, e2});
    rep.tables.push_back(std::move(t));
    return runs[2];
  });

  timed(rep, "conservation", [&] {
    auto integral = [&](const Field& u) {
      double s = 0.0;
      for (const auto& v : u.values()) s += v.real();
      return s * g.cell_volume();
    };
    const double m0 = integral(u0), scale = lp_norm(u0, 1.0);
    double drift = 0.0;
    for (const Field& u : nonlinear.states) drift = std::max(drift, std::abs(integral(u) - m0) / scale);
    rep.checks.push_back(check_at_most("mean conservation", drift, c.tol.mean, "max |int u(t) - int u0| / ||u0||_1"));
    if (nonlinear.nonnegative_datum)
      rep.checks.push_back(check_at_most("L1 non-expansion", nonlinear.l1_growth, c.tol.l1_growth,
                                         "max ||u(t)||_1 / ||u0||_1 - 1 for a nonnegative datum"));
    else
      rep.warnings.push_back("family base profile is not nonnegative; L1 non-expansion not checked");
  });

  timed(rep, "determinism", [&] {
    const Trajectory a = solve(u0, base), b = solve(u0, base);
    rep.checks.push_back(check_at_most("determinism", same_bytes(a, b) ? 0.0 : 1.0, 0.0, "two identical solves, byte comparison"));
  });

  timed(rep, "existence time", [&] {
    const double closed = existence_time(0.5, 0.5, 2.0, 2, 1.0, 1.0);
    const double hand = 0.5 * (0.125 * 0.125);  // (1/2) [ (1/2) / 4 ]^2
    rep.checks.push_back(check_at_most("existence time closed form", std::abs(closed - hand) / hand, 4e-16,
                                       "l1 = hs = 1/2, alpha = b = 2, |eta| = c = 1 gives 1/128"));

    const Field u0s = forward_transform(u0);
    const double l1 = lp_norm(u0, 1.0), hs = hs_norm(u0s, base.s), eta = base.eta_abs(), cc = base.scheme_constant;
    const double eps = c.eps;
    if (eta == 0.0) {
      rep.warnings.push_back("eta = 0: lower time bound is infinite, branch check skipped");
      return;
    }
    const T0Bound t0 = t0_lower_bound(l1, hs, eps, base.b, eta, cc);
    const double direct = (1.0 - 1.0 / (1.0 + eps)) / (std::pow(2.0, base.b) * cc * eta * std::pow(l1 + hs, base.b - 1));
    const double b1 = 0.5 * std::pow(direct, 2.0 / eps), b2 = 0.5 * std::pow(direct, 1.0 + eps);
    const double dev = std::max({std::abs(t0.branch_2_over_eps / b1 - 1.0), std::abs(t0.branch_1_plus_eps / b2 - 1.0),
                                 std::abs(t0.t0 / std::min(b1, b2) - 1.0)});
    rep.checks.push_back(check_at_most("lower time bound branches", dev, 1e-14, "against direct evaluation of both branches"));
    double worst = 0.0, worst_printed = 0.0;
    for (double a : c.alphas) {
      const double T = existence_time(l1, hs, a, base.b, eta, cc);
      worst = std::max(worst, t0.t0 / T);
      worst_printed = std::max(worst_printed, t0.printed_max / T);
    }
    rep.checks.push_back(check_at_most("lower time bound below existence times", worst, 1.0,
                                       "max over sweep alphas of t0 / T(alpha); the max of the two branches gives " +
                                           g17(worst_printed)));
  });

  timed(rep, "uniform bound probe", [&] {
    DataFamilySpec fam = c.family;
    fam.gamma = c.gammas.front();
    const DataFamily members = make_data_family(fam, g, c.validation.probe_alphas);
    const UniformProbe probe = uniform_hs_bound_probe(
        base, c.validation.probe_alphas, [&](double a) { return members.members.at(a); }, c.validation.probe_horizon,
        c.threads);
    rep.checks.push_back(check_at_most("uniform Hs bound spread", probe.spread, c.tol.probe_spread,
                                       "max / min over alpha of sup_t ||u^b||_Hs"));
    DataTable t{"uniform_probe", {"alpha", "sup_hs_of_u_pow_b"}, {}};
    for (std::size_t i = 0; i < probe.alphas.size(); ++i) t.rows.push_back({probe.alphas[i], probe.sups[i]});
    rep.tables.push_back(std::move(t));
  });
}

}  // namespace detail

/// Runs the configured study. Module errors do not propagate: the report is
/// marked incomplete and carries the message.
inline StudyReport run_study(const RunConfig& cfg) {
  validate(cfg);
  StudyReport rep;
  rep.study = cfg.study;
  rep.config_hash = config_hash(cfg);
  try {
    switch (cfg.study) {
      case StudyKind::kernel_rate: detail::kernel_rate_study(cfg, rep); break;
      case StudyKind::solution_rate: detail::solution_rate_study(cfg, rep); break;
      case StudyKind::kernel_props: detail::kernel_props_study(cfg, rep); break;
      case StudyKind::solver_validate: detail::solver_validate_study(cfg, rep); break;
    }
  } catch (const Error& e) {
    rep.complete = false;
    rep.error = std::string(to_string(cfg.study)) + ": " + e.what();
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Artifacts

/// Creates `dir` if needed and verifies it is writable.
inline void prepare_output_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (dir.empty()) throw ConfigError("output directory is empty");
  if (fs::exists(dir, ec) && !fs::is_directory(dir, ec)) throw ConfigError("output path '" + dir + "' is not a directory");
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  const fs::path probe = fs::path(dir) / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw ConfigError("output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
}

inline nlohmann::ordered_json to_json(const CheckResult& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["measured"] = c.measured;
  j["target"] = c.target ? nlohmann::ordered_json(*c.target) : nlohmann::ordered_json(nullptr);
  j["tolerance"] = c.tolerance ? nlohmann::ordered_json(*c.tolerance) : nlohmann::ordered_json(nullptr);
  j["lo"] = c.lo;  // infinite bounds serialize as null
  j["hi"] = c.hi;
  j["passed"] = c.passed;
  j["note"] = c.note;
  return j;
}

inline nlohmann::ordered_json to_json(const FitRecord& f) {
  nlohmann::ordered_json j;
  j["name"] = f.name;
  j["norm_id"] = f.fit.norm_id;
  j["x"] = f.x_label;
  j["slope"] = f.fit.slope;
  j["intercept"] = f.fit.intercept;
  j["r_squared"] = f.fit.r_squared;
  j["predicted"] = f.predicted;
  j["abscissae"] = f.fit.abscissae;
  j["errors"] = f.fit.errors;
  j["excluded"] = f.fit.excluded;
  return j;
}

inline std::string report_json(const StudyReport& r, bool strict = false) {
  nlohmann::ordered_json j;
  j["study"] = to_string(r.study);
  j["config_hash"] = r.config_hash;
  j["complete"] = r.complete;
  j["error"] = r.error;
  j["strict"] = strict;
  j["passed"] = r.passed(strict);
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
  j["fits"] = nlohmann::ordered_json::array();
  for (const auto& f : r.fits) j["fits"].push_back(to_json(f));
  j["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : r.tables) j["tables"].push_back(t.name + ".csv");
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

inline std::string timings_json(const StudyReport& r) {
  nlohmann::ordered_json j;
  j["config_hash"] = r.config_hash;
  nlohmann::ordered_json t = nlohmann::ordered_json::object();
  for (const auto& [name, sec] : r.timings) t[name] = sec;
  j["seconds"] = t;
  return j.dump(2) + "\n";
}

inline std::string table_csv(const DataTable& t, const std::string& hash) {
  std::string s = "# config " + hash + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + detail::g17(row[i]);
    s += "\n";
  }
  return s;
}

/// Two-column log10 data: measured pairs, two blank lines, fitted line.
inline std::string plot_data(const FitRecord& f, const std::string& hash) {
  using detail::g17;
  std::string s = "# config " + hash + "\n# fit " + f.name + " slope " + g17(f.fit.slope) + " intercept " +
                  g17(f.fit.intercept) + " r_squared " + g17(f.fit.r_squared) + " predicted " + g17(f.predicted) +
                  "\n# block 0: log10(" + f.x_label + ") log10(value)\n";
  for (std::size_t i = 0; i < f.fit.abscissae.size(); ++i)
    s += g17(std::log10(f.fit.abscissae[i])) + " " + g17(std::log10(f.fit.errors[i])) + "\n";
  s += "\n\n# block 1: fitted line\n";
  for (double x : f.fit.abscissae) s += g17(std::log10(x)) + " " + g17(std::log10(f.fit.predict(x))) + "\n";
  return s;
}

/// Writes config.yaml, report.json, timings.json, one CSV per table and one
/// .dat per fit. All writes happen here, after the study has finished.
inline void write_outputs(const StudyReport& r, const RunConfig& cfg, const std::string& dir, bool strict = false) {
  namespace fs = std::filesystem;
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    f << text;
    if (!f) throw Error("write_outputs: cannot write " + (fs::path(dir) / name).string());
  };
  put("config.yaml", "# config " + r.config_hash + "\n" + to_yaml(cfg));
  for (const auto& t : r.tables) put(t.name + ".csv", table_csv(t, r.config_hash));
  for (const auto& f : r.fits) put(f.name + ".dat", plot_data(f, r.config_hash));
  put("report.json", report_json(r, strict));
  put("timings.json", timings_json(r));
}

}  // namespace fracheat
