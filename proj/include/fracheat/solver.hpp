#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fracheat/errors.hpp"
#include "fracheat/grid.hpp"
#include "fracheat/kernel.hpp"
#include "fracheat/norms.hpp"
#include "fracheat/parallel.hpp"
#include "fracheat/spectral.hpp"

namespace fracheat {

/// Calibrated scheme constant in the existence-time formula; see
/// calibrate_scheme_constant.
inline constexpr double default_scheme_constant = 0.03125;

/// Parameters of d_t u + (-Lap)^{alpha/2} u + eta . grad(u^b) = 0.
struct SolveConfig {
  double alpha = 2.0;
  int b = 2;
  std::vector<double> eta{1.0};
  double s = 1.0;
  double horizon = 1.0;
  Grid grid = make_grid(1, 1024, 32.0);
  double dt = 1.0 / 512;
  double picard_tol = 1e-10;
  int picard_max_iter = 50;
  std::optional<double> dealias_fraction;  ///< default 2 / (b + 1)
  int snapshots = 65;
  double scheme_constant = default_scheme_constant;
  bool enforce_l1_bound = true;  ///< assert L1 non-expansion for nonnegative data

  double effective_dealias() const { return dealias_fraction.value_or(2.0 / (b + 1)); }

  double eta_abs() const {
    double e = 0.0;
    for (double v : eta) e += v * v;
    return std::sqrt(e);
  }

  void validate() const {
    if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("SolveConfig: alpha must lie in (1, 2]");
    if (b < 2) throw DomainError("SolveConfig: b must be an integer >= 2");
    if (static_cast<int>(eta.size()) != grid.dim())
      throw DomainError("SolveConfig: eta must have one entry per dimension");
    for (double e : eta)
      if (!std::isfinite(e)) throw DomainError("SolveConfig: eta must be finite");
    if (!(s > 0.5 * grid.dim())) throw DomainError("SolveConfig: s must exceed n/2");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("SolveConfig: horizon must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("SolveConfig: dt must be positive");
    if (!(picard_tol > 0.0)) throw DomainError("SolveConfig: picard_tol must be positive");
    if (picard_max_iter < 1) throw DomainError("SolveConfig: picard_max_iter must be >= 1");
    const double f = effective_dealias();
    if (!(f > 0.0 && f <= 1.0)) throw DomainError("SolveConfig: dealias_fraction must lie in (0, 1]");
    if (snapshots < 2) throw DomainError("SolveConfig: snapshots must be >= 2");
    if (!(scheme_constant > 0.0)) throw DomainError("SolveConfig: scheme_constant must be positive");
  }
};

struct Diagnostics {
  double l1, l2, linf, hs;
};

/// One Picard segment of a solve.
struct SegmentRecord {
  double start;
  double existence_time;  ///< closed-form time of the segment's initial state
  double length;          ///< time actually covered
  int steps;
  int iterations;
  std::vector<double> residuals;  ///< E_T residual after each iteration
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> states;  ///< physical, real
  std::vector<Diagnostics> diagnostics;
  std::vector<SegmentRecord> segmentation;
  double step = 0.0;            ///< micro-step actually used
  bool nonnegative_datum = false;
  double l1_growth = 0.0;       ///< max over snapshots of ||u||_1 / ||u0||_1 - 1
};

// ---------------------------------------------------------------------------
// Closed-form times

/// T = 1/2 [ (1 - 1/alpha) / (2^b c |eta| (l1 + hs)^{b-1}) ]^{alpha/(alpha-1)}.
/// Infinite when eta = 0 or the datum vanishes.
inline double existence_time(double l1, double hs, double alpha, int b, double eta_abs, double c) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("existence_time: alpha must lie in (1, 2]");
  if (b < 2) throw DomainError("existence_time: b must be >= 2");
  if (!(l1 >= 0.0) || !(hs >= 0.0) || !(eta_abs >= 0.0) || !(c > 0.0))
    throw DomainError("existence_time: norms and |eta| must be >= 0, c > 0");
  const double denom = std::ldexp(c * eta_abs * std::pow(l1 + hs, b - 1), b);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * std::pow((1.0 - 1.0 / alpha) / denom, alpha / (alpha - 1.0));
}

/// Both branches of the uniform lower time bound over alpha in (1+eps, 2).
struct T0Bound {
  double base;            ///< (1 - 1/(1+eps)) / (2^b c |eta| M^{b-1}), M = l1 + hs of the alpha = 2 datum
  double branch_2_over_eps;
  double branch_1_plus_eps;
  double printed_max;     ///< max of the two branches
  double t0;              ///< min of the two branches: the value that is a lower bound for every alpha
};

inline T0Bound t0_lower_bound(double l1_2, double hs_2, double eps, int b, double eta_abs, double c) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("t0_lower_bound: eps must lie in (0, 1)");
  if (b < 2) throw DomainError("t0_lower_bound: b must be >= 2");
  if (!(l1_2 + hs_2 > 0.0) || !(eta_abs > 0.0) || !(c > 0.0))
    throw DomainError("t0_lower_bound: norms, |eta| and c must be positive");
  T0Bound r{};
  r.base = (1.0 - 1.0 / (1.0 + eps)) / std::ldexp(c * eta_abs * std::pow(l1_2 + hs_2, b - 1), b);
  r.branch_2_over_eps = 0.5 * std::pow(r.base, 2.0 / eps);
  r.branch_1_plus_eps = 0.5 * std::pow(r.base, 1.0 + eps);
  r.printed_max = std::max(r.branch_2_over_eps, r.branch_1_plus_eps);
  r.t0 = std::min(r.branch_2_over_eps, r.branch_1_plus_eps);
  return r;
}

// ---------------------------------------------------------------------------
// Nonlinearity and stepping

namespace detail {

inline double ipow(double x, int b) {
  double r = 1.0;
  for (int i = 0; i < b; ++i) r *= x;
  return r;
}

/// Per-configuration tables shared by every step of a solve.
struct StepTables {
  Grid grid;
  double h = 0.0;
  std::vector<double> decay;     ///< exp(-h |xi|^alpha)
  std::vector<complex> deriv;    ///< i eta.xi on retained modes, 0 elsewhere
  bool linear = true;
  int b = 2;

  StepTables(const Grid& g, double alpha, int b_, const std::vector<double>& eta, double fraction, double step)
      : grid(g), h(step), decay(g.size()), deriv(g.size()), b(b_) {
    const int n = g.points_per_axis();
    const double cutoff = fraction * (n / 2);
    for (double e : eta) linear = linear && e == 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      decay[i] = std::exp(-h * xi_power(g.xi_norm_sq(i), alpha));
      bool keep = true;
      for (int a = 0; a < g.dim(); ++a) {
        const int j = g.lattice_index(a, i);
        keep = keep && j != -n / 2 && std::abs(j) <= cutoff;
      }
      if (!keep) continue;
      double dot = 0.0;
      for (int a = 0; a < g.dim(); ++a) dot += eta[a] * g.xi(a, i);
      deriv[i] = complex(0.0, dot);
    }
  }
};

/// Spectral eta.grad(u^b) from physical samples; `out` is overwritten.
inline void nonlinear_spectral(const StepTables& tab, std::span<const complex> phys, std::vector<complex>& out) {
  out.resize(phys.size());
  if (tab.linear) {
    std::fill(out.begin(), out.end(), complex{});
    return;
  }
  for (std::size_t i = 0; i < phys.size(); ++i) out[i] = ipow(phys[i].real(), tab.b);
  forward_in_place(tab.grid, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= tab.deriv[i];
}

inline bool all_finite(std::span<const complex> v) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

inline std::vector<complex> to_phys(const Grid& g, std::span<const complex> spec) {
  std::vector<complex> p(spec.begin(), spec.end());
  inverse_in_place(g, p);
  return p;
}

inline double l1_of(const Grid& g, std::span<const complex> phys) {
  double s = 0.0;
  for (const auto& z : phys) s += std::abs(z.real());
  return s * g.cell_volume();
}

inline double hs_of(const Grid& g, std::span<const complex> spec, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) acc += std::pow(1.0 + g.xi_norm_sq(i), s) * std::norm(spec[i]);
  return std::sqrt(acc * g.mode_volume());
}

/// One interaction-picture Heun step in coefficient space.
inline void heun_step(const StepTables& tab, std::vector<complex>& v, double t) {
  if (tab.linear) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= tab.decay[i];
    return;
  }
  std::vector<complex> n0, n1, pred(v.size());
  nonlinear_spectral(tab, to_phys(tab.grid, v), n0);
  if (!all_finite(n0)) throw BlowUpError("duhamel_step: non-finite nonlinear term", t);
  for (std::size_t i = 0; i < v.size(); ++i) pred[i] = tab.decay[i] * (v[i] - tab.h * n0[i]);
  nonlinear_spectral(tab, to_phys(tab.grid, pred), n1);
  if (!all_finite(n1)) throw BlowUpError("duhamel_step: non-finite nonlinear term", t + tab.h);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = tab.decay[i] * v[i] - 0.5 * tab.h * (tab.decay[i] * n0[i] + n1[i]);
}

/// Picard iteration of the discretized Duhamel map on `steps` micro-steps
/// from coefficients `v0`. Returns the coefficients at every micro-step
/// (index 0 is v0) and fills iteration count and residual history.
inline std::vector<std::vector<complex>> picard_segment(const StepTables& tab, const std::vector<complex>& v0,
                                                        int steps, double s, double tol, int max_iter,
                                                        double t_start, SegmentRecord& rec) {
  const Grid& g = tab.grid;
  const std::size_t M = static_cast<std::size_t>(steps);
  // iterate 0: the linear trajectory
  std::vector<std::vector<complex>> lin(M + 1), U, P(M + 1);
  lin[0] = v0;
  for (std::size_t m = 0; m < M; ++m) {
    lin[m + 1] = lin[m];
    for (std::size_t i = 0; i < v0.size(); ++i) lin[m + 1][i] *= tab.decay[i];
  }
  U = lin;
  rec.iterations = 0;
  rec.residuals.clear();
  if (tab.linear) {
    rec.iterations = 1;
    rec.residuals.push_back(0.0);
    return U;
  }
  for (std::size_t m = 0; m <= M; ++m) P[m] = to_phys(g, U[m]);

  std::vector<std::vector<complex>> N(M + 1);
  nonlinear_spectral(tab, P[0], N[0]);
  if (!all_finite(N[0])) throw BlowUpError("picard_solve_segment: non-finite nonlinear term", t_start);

  std::vector<complex> I(v0.size()), diff(v0.size());
  for (int k = 1; k <= max_iter; ++k) {
    for (std::size_t m = 1; m <= M; ++m) nonlinear_spectral(tab, P[m], N[m]);
    std::fill(I.begin(), I.end(), complex{});
    double residual = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t i = 0; i < I.size(); ++i)
        I[i] = tab.decay[i] * I[i] + 0.5 * tab.h * (tab.decay[i] * N[m][i] + N[m + 1][i]);
      std::vector<complex> next(I.size());
      for (std::size_t i = 0; i < I.size(); ++i) next[i] = lin[m + 1][i] - I[i];
      std::vector<complex> next_phys = to_phys(g, next);
      for (std::size_t i = 0; i < I.size(); ++i) diff[i] = next[i] - U[m + 1][i];
      double l1 = 0.0;
      for (std::size_t i = 0; i < I.size(); ++i) l1 += std::abs(next_phys[i].real() - P[m + 1][i].real());
      residual = std::max(residual, l1 * g.cell_volume() + hs_of(g, diff, s));
      U[m + 1] = std::move(next);
      P[m + 1] = std::move(next_phys);
    }
    rec.iterations = k;
    rec.residuals.push_back(residual);
    if (!std::isfinite(residual))
      throw NonContractionError("picard_solve_segment: iterates diverged at t = " + std::to_string(t_start), k);
    if (residual < tol) return U;
    if (k >= 3 && residual >= rec.residuals[k - 2])
      throw NonContractionError("picard_solve_segment: residual stopped contracting at iteration " +
                                    std::to_string(k) + " (t = " + std::to_string(t_start) + ")",
                                k);
  }
  throw NonContractionError("picard_solve_segment: picard_max_iter exceeded at t = " + std::to_string(t_start),
                            max_iter);
}

inline Diagnostics diagnose(const Grid& g, std::span<const complex> spec, std::span<const complex> phys, double s) {
  Diagnostics d{};
  double l2 = 0.0;
  for (const auto& z : phys) {
    const double a = std::abs(z.real());
    d.l1 += a;
    l2 += a * a;
    d.linf = std::max(d.linf, a);
  }
  d.l1 *= g.cell_volume();
  d.l2 = std::sqrt(l2 * g.cell_volume());
  d.hs = hs_of(g, spec, s);
  return d;
}

inline Field real_field(const Grid& g, std::span<const complex> phys) {
  std::vector<complex> v(phys.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = phys[i].real();
  return Field(g, std::move(v), Representation::physical);
}

inline std::vector<complex> real_coefficients(const Field& u) {
  std::vector<complex> v(u.size());
  if (u.is_physical()) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = u[i].real();
    forward_in_place(u.grid(), v);
  } else {
    std::copy(u.values().begin(), u.values().end(), v.begin());
  }
  return v;
}

}  // namespace detail

/// eta.grad(u^b) as a spectral field. u^b is formed from the real part of the
/// physical samples; coefficients with |j_axis| above `dealias_fraction` of
/// N/2 on any axis, and the Nyquist modes, are zeroed before differentiating.
inline Field nonlinear_term(const Field& u, int b, const std::vector<double>& eta,
                            std::optional<double> dealias_fraction = std::nullopt) {
  u.require(Representation::physical, "nonlinear_term");
  if (b < 2) throw DomainError("nonlinear_term: b must be >= 2");
  if (static_cast<int>(eta.size()) != u.grid().dim())
    throw DomainError("nonlinear_term: eta must have one entry per dimension");
  const double f = dealias_fraction.value_or(2.0 / (b + 1));
  if (!(f > 0.0 && f <= 1.0)) throw DomainError("nonlinear_term: dealias_fraction must lie in (0, 1]");
  const detail::StepTables tab(u.grid(), 2.0, b, eta, f, 0.0);
  std::vector<complex> out;
  detail::nonlinear_spectral(tab, u.values(), out);
  return Field(u.grid(), std::move(out), Representation::spectral);
}

/// One exponential-integrator step of length dt (<= cfg.dt): predictor
/// E(u - dt N(u)), corrector E u - dt/2 (E N(u) + N(pred)), E = exp(-dt A).
/// The result has the representation of the input.
inline Field duhamel_step(const Field& u, const SolveConfig& cfg, double dt) {
  cfg.validate();
  if (!(u.grid() == cfg.grid)) throw DomainError("duhamel_step: field grid differs from config grid");
  if (!(dt > 0.0) || dt > cfg.dt * (1.0 + 1e-12)) throw DomainError("duhamel_step: need 0 < dt <= cfg.dt");
  if (!detail::all_finite(u.values())) throw BlowUpError("duhamel_step: non-finite input", 0.0);
  const detail::StepTables tab(cfg.grid, cfg.alpha, cfg.b, cfg.eta, cfg.effective_dealias(), dt);
  std::vector<complex> v = detail::real_coefficients(u);
  detail::heun_step(tab, v, 0.0);
  if (u.is_physical()) inverse_in_place(cfg.grid, v);
  return Field(cfg.grid, std::move(v), u.representation());
}

/// Picard iteration of the Duhamel map on [0, segment_T], discretized with
/// ceil(segment_T / cfg.dt) equal micro-steps. Returns the trajectory at every
/// micro-step; its single segmentation record carries the residual history.
inline Trajectory picard_solve_segment(const Field& u0, const SolveConfig& cfg, double segment_T) {
  cfg.validate();
  if (!(u0.grid() == cfg.grid)) throw DomainError("picard_solve_segment: datum grid differs from config grid");
  if (!(segment_T > 0.0) || !std::isfinite(segment_T))
    throw DomainError("picard_solve_segment: segment_T must be positive and finite");
  const int steps = static_cast<int>(std::ceil(segment_T / cfg.dt * (1.0 - 1e-12)));
  const double h = segment_T / steps;
  const detail::StepTables tab(cfg.grid, cfg.alpha, cfg.b, cfg.eta, cfg.effective_dealias(), h);
  const std::vector<complex> v0 = detail::real_coefficients(u0);
  const std::vector<complex> p0 = detail::to_phys(cfg.grid, v0);
  SegmentRecord rec{0.0,
                    existence_time(detail::l1_of(cfg.grid, p0), detail::hs_of(cfg.grid, v0, cfg.s), cfg.alpha,
                                   cfg.b, cfg.eta_abs(), cfg.scheme_constant),
                    segment_T, steps, 0, {}};
  auto U = detail::picard_segment(tab, v0, steps, cfg.s, cfg.picard_tol, cfg.picard_max_iter, 0.0, rec);
  Trajectory tr;
  tr.step = h;
  for (int m = 0; m <= steps; ++m) {
    const auto phys = detail::to_phys(cfg.grid, U[m]);
    tr.times.push_back(m == steps ? segment_T : m * h);
    tr.states.push_back(detail::real_field(cfg.grid, phys));
    tr.diagnostics.push_back(detail::diagnose(cfg.grid, U[m], phys, cfg.s));
  }
  tr.segmentation.push_back(std::move(rec));
  return tr;
}

namespace detail {

struct Schedule {
  int total_steps;
  int steps_per_snapshot;
  double h;
};

// Equal micro-steps no longer than dt with every snapshot time on a node.
inline Schedule schedule(const SolveConfig& cfg) {
  const int intervals = cfg.snapshots - 1;
  const int per = std::max(1, static_cast<int>(std::ceil(cfg.horizon / (intervals * cfg.dt) * (1.0 - 1e-12))));
  return {per * intervals, per, cfg.horizon / (per * intervals)};
}

inline double snapshot_time(const SolveConfig& cfg, int k) {
  return k == cfg.snapshots - 1 ? cfg.horizon : cfg.horizon * k / (cfg.snapshots - 1);
}

inline bool nonnegative(std::span<const complex> phys) {
  for (const auto& z : phys)
    if (z.real() < 0.0) return false;
  return true;
}

}  // namespace detail

/// Solves on [0, cfg.horizon] by chaining Picard segments. Each segment spans
/// the existence time of its initial state (at least one micro-step, at most
/// the remaining horizon). Snapshots are taken at cfg.snapshots uniform times.
inline Trajectory solve(const Field& u0, const SolveConfig& cfg) {
  cfg.validate();
  const Grid& g = cfg.grid;
  if (!(u0.grid() == g)) throw DomainError("solve: datum grid differs from config grid");
  std::vector<complex> v = detail::real_coefficients(u0);
  std::vector<complex> phys = detail::to_phys(g, v);
  if (!detail::all_finite(phys)) throw DomainError("solve: datum is not finite");
  const detail::Schedule sch = detail::schedule(cfg);

  Trajectory tr;
  tr.step = sch.h;
  const Field first = detail::real_field(g, u0.is_physical() ? u0.values() : std::span<const complex>(phys));
  tr.nonnegative_datum = detail::nonnegative(first.values());
  auto record = [&](int k, const std::vector<complex>& spec, const std::vector<complex>& p) {
    tr.times.push_back(detail::snapshot_time(cfg, k));
    tr.states.push_back(k == 0 ? first : detail::real_field(g, p));
    tr.diagnostics.push_back(detail::diagnose(g, spec, p, cfg.s));
    const Diagnostics& d = tr.diagnostics.back();
    if (!std::isfinite(d.l1) || !std::isfinite(d.hs) || !std::isfinite(d.linf))
      throw BlowUpError("solve: non-finite diagnostics", tr.times.back());
  };
  record(0, v, phys);
  const double l1_0 = tr.diagnostics[0].l1;
  if (l1_0 == 0.0) {
    for (int k = 1; k < cfg.snapshots; ++k) record(k, v, phys);
    return tr;
  }

  const detail::StepTables tab(g, cfg.alpha, cfg.b, cfg.eta, cfg.effective_dealias(), sch.h);
  int done = 0;
  while (done < sch.total_steps) {
    const double t0 = done * sch.h;
    const double texist = existence_time(detail::l1_of(g, phys), detail::hs_of(g, v, cfg.s), cfg.alpha, cfg.b,
                                         cfg.eta_abs(), cfg.scheme_constant);
    const double fit = texist / sch.h * (1.0 + 1e-12);
    const int steps = fit >= sch.total_steps - done ? sch.total_steps - done
                                                    : std::max(1, static_cast<int>(std::floor(fit)));
    SegmentRecord rec{t0, texist, steps * sch.h, steps, 0, {}};
    auto U = detail::picard_segment(tab, v, steps, cfg.s, cfg.picard_tol, cfg.picard_max_iter, t0, rec);
    tr.segmentation.push_back(std::move(rec));
    for (int m = 1; m <= steps; ++m) {
      if ((done + m) % sch.steps_per_snapshot != 0) continue;
      const auto p = detail::to_phys(g, U[m]);
      record((done + m) / sch.steps_per_snapshot, U[m], p);
      const double growth = tr.diagnostics.back().l1 / l1_0 - 1.0;
      tr.l1_growth = std::max(tr.l1_growth, growth);
    }
    v = std::move(U[steps]);
    phys = detail::to_phys(g, v);
    done += steps;
    const double growth = detail::l1_of(g, phys) / l1_0 - 1.0;
    tr.l1_growth = std::max(tr.l1_growth, growth);
    if (cfg.enforce_l1_bound && tr.nonnegative_datum && tr.l1_growth > 1e-6)
      throw InvariantViolation("solve: L1 norm grew by " + std::to_string(tr.l1_growth) +
                               " relative for nonnegative data (t = " + std::to_string(done * sch.h) + ")");
  }
  return tr;
}

/// Same schedule as solve, advanced by chained duhamel_step calls instead of
/// Picard segments.
inline Trajectory march(const Field& u0, const SolveConfig& cfg) {
  cfg.validate();
  const Grid& g = cfg.grid;
  if (!(u0.grid() == g)) throw DomainError("march: datum grid differs from config grid");
  const detail::Schedule sch = detail::schedule(cfg);
  const detail::StepTables tab(g, cfg.alpha, cfg.b, cfg.eta, cfg.effective_dealias(), sch.h);
  std::vector<complex> v = detail::real_coefficients(u0);
  Trajectory tr;
  tr.step = sch.h;
  auto record = [&](int k) {
    const auto p = detail::to_phys(g, v);
    tr.times.push_back(detail::snapshot_time(cfg, k));
    tr.states.push_back(detail::real_field(g, p));
    tr.diagnostics.push_back(detail::diagnose(g, v, p, cfg.s));
  };
  record(0);
  for (int m = 1; m <= sch.total_steps; ++m) {
    detail::heun_step(tab, v, (m - 1) * sch.h);
    if (m % sch.steps_per_snapshot == 0) record(m / sch.steps_per_snapshot);
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Sweeps

struct UniformProbe {
  std::vector<double> alphas;
  std::vector<double> sups;  ///< sup over snapshots of ||u_alpha^b||_{H^s}
  double spread;             ///< max / min of sups
};

/// Solves once per alpha (datum from `datum(alpha)`, horizon T) and reports
/// sup_t ||u^b||_{H^s} per alpha.
inline UniformProbe uniform_hs_bound_probe(const SolveConfig& base, const std::vector<double>& alphas,
                                           const std::function<Field(double)>& datum, double T, int threads = 1) {
  if (alphas.empty()) throw DomainError("uniform_hs_bound_probe: empty alpha list");
  UniformProbe out;
  out.alphas = alphas;
  out.sups.assign(alphas.size(), 0.0);
  parallel_for(alphas.size(), threads, [&](std::size_t i) {
    SolveConfig cfg = base;
    cfg.alpha = alphas[i];
    cfg.horizon = T;
    const Trajectory tr = solve(datum(alphas[i]), cfg);
    double sup = 0.0;
    for (const Field& u : tr.states) {
      std::vector<complex> w(u.size());
      for (std::size_t k = 0; k < w.size(); ++k) w[k] = detail::ipow(u[k].real(), cfg.b);
      sup = std::max(sup, hs_norm(forward_transform(Field(u.grid(), std::move(w), Representation::physical)), cfg.s));
    }
    out.sups[i] = sup;
  });
  const auto [lo, hi] = std::minmax_element(out.sups.begin(), out.sups.end());
  out.spread = *hi / *lo;
  return out;
}

/// Outcome of one calibration run.
struct CalibrationEntry {
  double alpha;
  int b;
  double amplitude;
  double segment;        ///< existence time used as the segment length
  bool contracted;
  double worst_ratio;    ///< max residual ratio after iteration 2
};

struct Calibration {
  double constant;
  std::vector<CalibrationEntry> entries;  ///< runs at the returned constant
};

/// Runs the calibration matrix at scheme constant c: alpha in {1.5, 1.9, 2}
/// x b in {2, 3} x amplitude in {0.5, 1, 2}, Gaussian data a exp(-x^2),
/// eta = 1, s = 1, on a 256-point grid of half-length 16. Each run iterates
/// on a segment of the closed-form existence time resolved by 64 micro-steps;
/// it counts as contracting when it converges and every residual ratio after
/// iteration 2 is <= 1/2.
inline std::vector<CalibrationEntry> calibration_matrix(double c) {
  const Grid g = make_grid(1, 256, 16.0);
  std::vector<CalibrationEntry> out;
  for (double a : {1.5, 1.9, 2.0})
    for (int b : {2, 3})
      for (double amp : {0.5, 1.0, 2.0}) {
        const Field u0 = Field::sample(g, [amp](double x) { return amp * std::exp(-x * x); });
        const std::vector<complex> v0 = detail::real_coefficients(u0);
        const double l1 = lp_norm(u0, 1.0), hs = detail::hs_of(g, v0, 1.0);
        CalibrationEntry e{a, b, amp, existence_time(l1, hs, a, b, 1.0, c), false, 0.0};
        const detail::StepTables tab(g, a, b, {1.0}, 2.0 / (b + 1), e.segment / 64);
        SegmentRecord rec{};
        try {
          detail::picard_segment(tab, v0, 64, 1.0, 1e-11 * (l1 + hs), 60, 0.0, rec);
          e.contracted = true;
        } catch (const NonContractionError&) {
        } catch (const BlowUpError&) {
        }
        for (std::size_t k = 2; k < rec.residuals.size(); ++k)
          e.worst_ratio = std::max(e.worst_ratio, rec.residuals[k] / rec.residuals[k - 1]);
        e.contracted = e.contracted && e.worst_ratio <= 0.5;
        out.push_back(e);
      }
  return out;
}

/// Smallest power of two c such that the calibration matrix contracts at c
/// and at every larger power of two up to 2^max_exponent. Searching downward
/// matters: on a periodic box very long segments can contract again once the
/// solution has flattened, which says nothing about the scheme.
inline Calibration calibrate_scheme_constant(int max_exponent = 12, int min_exponent = -12) {
  auto all_ok = [](const std::vector<CalibrationEntry>& v) {
    return std::all_of(v.begin(), v.end(), [](const auto& e) { return e.contracted; });
  };
  Calibration best{std::ldexp(1.0, max_exponent), calibration_matrix(std::ldexp(1.0, max_exponent))};
  if (!all_ok(best.entries)) throw Error("calibrate_scheme_constant: no contraction even at the largest constant");
  for (int k = max_exponent - 1; k >= min_exponent; --k) {
    auto entries = calibration_matrix(std::ldexp(1.0, k));
    if (!all_ok(entries)) break;
    best = {std::ldexp(1.0, k), std::move(entries)};
  }
  return best;
}

}  // namespace fracheat
