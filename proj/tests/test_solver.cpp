#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <numbers>

#include "fracheat/rate_fit.hpp"
#include "fracheat/solver.hpp"

using namespace fracheat;
using Catch::Approx;

namespace {

SolveConfig small_config(double alpha = 1.8) {
  SolveConfig cfg;
  cfg.alpha = alpha;
  cfg.grid = make_grid(1, 256, 16.0);
  cfg.dt = 1.0 / 128;
  cfg.horizon = 0.5;
  cfg.snapshots = 9;
  return cfg;
}

Field bump(const Grid& g, double amp = 1.0, double center = 0.0) {
  return Field::sample(g, [=](double x) { return amp * std::exp(-(x - center) * (x - center)); });
}

double sup_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2_diff(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s * a.grid().cell_volume());
}

double mean(const Field& u) {
  double s = 0.0;
  for (const auto& v : u.values()) s += v.real();
  return s * u.grid().cell_volume();
}

Field step_n(Field u, const SolveConfig& cfg, double dt, int n) {
  for (int i = 0; i < n; ++i) u = duhamel_step(u, cfg, dt);
  return u;
}

}  // namespace

TEST_CASE("existence time closed form") {
  REQUIRE(existence_time(0.5, 0.5, 2.0, 2, 1.0, 1.0) == Approx(1.0 / 128).epsilon(1e-15));
  REQUIRE(existence_time(1.0, 1.0, 2.0, 2, 1.0, 1.0) == Approx(existence_time(0.5, 0.5, 2.0, 2, 1.0, 1.0) / 4));
  REQUIRE(existence_time(1.0, 0.0, 2.0, 2, 0.0, 1.0) == std::numeric_limits<double>::infinity());
  REQUIRE(existence_time(0.2, 0.2, 1.0001, 2, 1.0, 1.0) < 1e-100);
  double prev = existence_time(0.1, 0.1, 1.5, 3, 1.0, 1.0);
  for (double m : {0.3, 0.6, 1.0, 3.0}) {
    const double t = existence_time(m, m, 1.5, 3, 1.0, 1.0);
    REQUIRE(t < prev);
    prev = t;
  }
  REQUIRE_THROWS_AS(existence_time(1.0, 1.0, 1.0, 2, 1.0, 1.0), DomainError);
  REQUIRE_THROWS_AS(existence_time(1.0, 1.0, 1.5, 1, 1.0, 1.0), DomainError);
}

TEST_CASE("lower time bound branches") {
  SECTION("unit base") {
    // 1 - 1/(1+eps) = 1/3 at eps = 0.5; 4 c |eta| M = 1/3 gives base 1
    const T0Bound r = t0_lower_bound(1.0 / 24, 1.0 / 24, 0.5, 2, 1.0, 1.0);
    REQUIRE(r.base == Approx(1.0).epsilon(1e-14));
    REQUIRE(r.t0 == Approx(0.5).epsilon(1e-14));
    REQUIRE(r.printed_max == Approx(0.5).epsilon(1e-14));
  }
  SECTION("base one half") {
    const T0Bound r = t0_lower_bound(1.0 / 12, 1.0 / 12, 0.5, 2, 1.0, 1.0);
    REQUIRE(r.base == Approx(0.5).epsilon(1e-14));
    REQUIRE(r.branch_2_over_eps == Approx(0.5 * std::pow(0.5, 4.0)).epsilon(1e-14));
    REQUIRE(r.branch_1_plus_eps == Approx(0.5 * std::pow(0.5, 1.5)).epsilon(1e-14));
    REQUIRE(r.printed_max == Approx(0.17678).epsilon(1e-4));
    REQUIRE(r.t0 == Approx(0.03125).epsilon(1e-14));
    // the min is below the existence time for every alpha in (1+eps, 2);
    // the max is not
    bool max_violates = false;
    for (double a = 1.501; a < 2.0; a += 0.01) {
      const double ta = existence_time(1.0 / 12, 1.0 / 12, a, 2, 1.0, 1.0);
      REQUIRE(r.t0 <= ta);
      max_violates = max_violates || r.printed_max > ta;
    }
    REQUIRE(max_violates);
  }
  SECTION("base above one") {
    const T0Bound r = t0_lower_bound(0.01, 0.01, 0.25, 3, 1.0, 1.0);
    REQUIRE(r.base > 1.0);
    REQUIRE(r.t0 == r.branch_1_plus_eps);
    for (double a = 1.251; a < 2.0; a += 0.01) REQUIRE(r.t0 <= existence_time(0.01, 0.01, a, 3, 1.0, 1.0));
  }
  REQUIRE_THROWS_AS(t0_lower_bound(1.0, 1.0, 0.0, 2, 1.0, 1.0), DomainError);
  REQUIRE_THROWS_AS(t0_lower_bound(1.0, 1.0, 1.0, 2, 1.0, 1.0), DomainError);
}

TEST_CASE("nonlinear term") {
  const Grid g = make_grid(1, 32, std::numbers::pi);
  SECTION("zero and constant fields") {
    for (double c : {0.0, 2.5}) {
      const Field n = nonlinear_term(Field::sample(g, [c](double) { return c; }), 2, {1.0});
      for (const auto& v : n.values()) REQUIRE(std::abs(v) < 1e-14);
    }
  }
  SECTION("sin^2 identity") {
    const Field n = inverse_transform(nonlinear_term(Field::sample(g, [](double x) { return std::sin(x); }), 2, {1.0}));
    for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(std::abs(n[i] - std::sin(2.0 * g.x(0, i))) < 1e-10);
  }
  SECTION("cubic with eta scaling") {
    // d/dx cos^3 x = -3 cos^2 x sin x = -(3/4)(sin x + sin 3x)
    const Field n = inverse_transform(nonlinear_term(Field::sample(g, [](double x) { return std::cos(x); }), 3, {-2.0}));
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.x(0, i);
      REQUIRE(std::abs(n[i] - 1.5 * (std::sin(x) + std::sin(3.0 * x))) < 1e-10);
    }
  }
  SECTION("two dimensions") {
    const Grid g2 = make_grid(2, 16, std::numbers::pi);
    const Field u = Field::sample(g2, [](double x, double y) { return std::sin(x) + std::cos(y); });
    const Field n = inverse_transform(nonlinear_term(u, 2, {1.0, 0.5}));
    for (std::size_t i = 0; i < g2.size(); ++i) {
      const double x = g2.x(0, i), y = g2.x(1, i);
      const double ux = std::cos(x), uy = -std::sin(y), v = std::sin(x) + std::cos(y);
      REQUIRE(std::abs(n[i] - 2.0 * v * (ux + 0.5 * uy)) < 1e-10);
    }
  }
  SECTION("dealiasing drops high modes") {
    const Field u = Field::sample(g, [](double x) { return std::cos(6.0 * x); });
    const Field n = nonlinear_term(u, 2, {1.0});  // cos^2 6x carries mode 12 > (2/3) 16
    for (const auto& v : n.values()) REQUIRE(std::abs(v) < 1e-14);
    const Field kept = nonlinear_term(u, 2, {1.0}, 1.0);
    double m = 0.0;
    for (const auto& v : kept.values()) m = std::max(m, std::abs(v));
    REQUIRE(m > 1.0);
  }
  REQUIRE_THROWS_AS(nonlinear_term(forward_transform(bump(g)), 2, {1.0}), RepresentationError);
  REQUIRE_THROWS_AS(nonlinear_term(bump(g), 2, {1.0, 1.0}), DomainError);
}

TEST_CASE("duhamel step") {
  SolveConfig cfg = small_config();
  const Field u = bump(cfg.grid, 0.8);

  SECTION("linear step equals the semigroup bit for bit") {
    cfg.eta = {0.0};
    const Field a = duhamel_step(u, cfg, cfg.dt);
    const Field b = apply_semigroup(u, {cfg.alpha, cfg.dt});
    REQUIRE(std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(complex)) == 0);
  }
  SECTION("continuity in dt") {
    std::vector<double> dts{1e-3, 1e-4, 1e-5, 1e-6}, d;
    for (double h : dts) d.push_back(l2_diff(duhamel_step(u, cfg, h), u));
    REQUIRE(fit_rate(dts, d).slope >= 0.99);
  }
  SECTION("second-order self-convergence") {
    const double dt = 1.0 / 128;
    const Field ref = step_n(u, cfg, dt / 8, 8 * 32);
    const double e1 = sup_diff(step_n(u, cfg, dt, 32), ref);
    const double e2 = sup_diff(step_n(u, cfg, dt / 2, 64), ref);
    REQUIRE(e1 / e2 >= 3.7);
  }
  SECTION("representation is preserved") {
    const Field a = duhamel_step(u, cfg, cfg.dt);
    const Field b = duhamel_step(forward_transform(u), cfg, cfg.dt);
    REQUIRE(b.is_spectral());
    REQUIRE(sup_diff(inverse_transform(b), a) < 1e-14);
  }
  SECTION("errors") {
    REQUIRE_THROWS_AS(duhamel_step(u, cfg, 2.0 * cfg.dt), DomainError);
    REQUIRE_THROWS_AS(duhamel_step(bump(cfg.grid, 1e200), cfg, cfg.dt), BlowUpError);
  }
}

TEST_CASE("picard segment") {
  SolveConfig cfg = small_config();
  SECTION("linear data converge in one iteration") {
    cfg.eta = {0.0};
    const Field u0 = bump(cfg.grid);
    const Trajectory tr = picard_solve_segment(u0, cfg, 0.25);
    REQUIRE(tr.segmentation.at(0).iterations == 1);
    REQUIRE(sup_diff(tr.states.back(), apply_semigroup(u0, {cfg.alpha, 0.25})) < 1e-12);
  }
  SECTION("small data contract geometrically") {
    const Trajectory tr = picard_solve_segment(bump(cfg.grid, 0.05), cfg, 0.25);
    const auto& r = tr.segmentation.at(0).residuals;
    REQUIRE(r.back() < cfg.picard_tol);
    REQUIRE(r.size() >= 4);
    for (std::size_t k = 2; k + 1 < r.size(); ++k) REQUIRE(r[k] / r[k - 1] < 0.1);
    const Trajectory tr2 = picard_solve_segment(bump(cfg.grid, 0.1), cfg, 0.25);
    const auto& r2 = tr2.segmentation.at(0).residuals;
    // contraction factor scales with the datum size (b - 1 = 1)
    REQUIRE(r2[2] / r2[1] == Approx(2.0 * r[2] / r[1]).epsilon(0.2));
  }
  SECTION("segment far beyond the existence time does not contract") {
    cfg.alpha = 1.5;
    cfg.picard_max_iter = 60;
    cfg.dt = 0.1;
    const Field u0 = bump(cfg.grid, 2.0);
    const double texist = existence_time(lp_norm(u0, 1.0), hs_norm(forward_transform(u0), cfg.s), cfg.alpha, cfg.b,
                                         1.0, cfg.scheme_constant);
    REQUIRE_THROWS_AS(picard_solve_segment(u0, cfg, 64.0 * texist), NonContractionError);
  }
}

TEST_CASE("solve") {
  SolveConfig cfg = small_config();
  const Field u0 = bump(cfg.grid);

  SECTION("schedule and diagnostics") {
    const Trajectory tr = solve(u0, cfg);
    REQUIRE(tr.times.size() == 9);
    REQUIRE(tr.times.front() == 0.0);
    REQUIRE(tr.times.back() == cfg.horizon);
    for (std::size_t k = 1; k < tr.times.size(); ++k) REQUIRE(tr.times[k] == Approx(k * cfg.horizon / 8));
    REQUIRE(sup_diff(tr.states[0], u0) == 0.0);
    REQUIRE(tr.diagnostics[0].l1 == Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
    for (const auto& d : tr.diagnostics) REQUIRE(std::isfinite(d.hs));
    REQUIRE(tr.step <= cfg.dt);
    for (const auto& seg : tr.segmentation)
      if (seg.steps > 1) REQUIRE(seg.length <= seg.existence_time * (1.0 + 1e-12));
  }
  SECTION("zero datum") {
    const Trajectory tr = solve(Field::zeros(cfg.grid, Representation::physical), cfg);
    REQUIRE(tr.states.size() == 9);
    REQUIRE(tr.segmentation.empty());
    for (const auto& s : tr.states) REQUIRE(lp_norm(s, infinity) == 0.0);
  }
  SECTION("linear exactness") {
    cfg.eta = {0.0};
    cfg.alpha = 1.4;
    const Trajectory tr = solve(u0, cfg);
    REQUIRE(tr.segmentation.size() == 1);
    for (std::size_t k = 1; k < tr.times.size(); ++k)
      REQUIRE(sup_diff(tr.states[k], apply_semigroup(u0, {cfg.alpha, tr.times[k]})) < 1e-10);
  }
  SECTION("mean conservation and L1 non-expansion") {
    cfg.alpha = 1.6;
    cfg.b = 3;
    const Field w = bump(cfg.grid, 1.5, 2.0);
    const Trajectory tr = solve(w, cfg);
    REQUIRE(tr.nonnegative_datum);
    for (const auto& s : tr.states) REQUIRE(std::abs(mean(s) - mean(w)) < 1e-10);
    for (const auto& d : tr.diagnostics) REQUIRE(d.l1 <= tr.diagnostics[0].l1 * (1.0 + 1e-6));
  }
  SECTION("determinism") {
    const Trajectory a = solve(u0, cfg), b = solve(u0, cfg);
    REQUIRE(a.times == b.times);
    for (std::size_t k = 0; k < a.states.size(); ++k)
      REQUIRE(std::memcmp(a.states[k].values().data(), b.states[k].values().data(),
                          a.states[k].size() * sizeof(complex)) == 0);
  }
  SECTION("picard and step march agree for small data") {
    SolveConfig c2 = cfg;
    c2.dt = 1.0 / 512;
    const Field w = bump(cfg.grid, 0.05);
    const Trajectory p = solve(w, c2), m = march(w, c2);
    for (std::size_t k = 0; k < p.states.size(); ++k) REQUIRE(sup_diff(p.states[k], m.states[k]) < 1e-7);
  }
  SECTION("heat case matches a fine reference") {
    SolveConfig c2 = cfg;
    c2.alpha = 2.0;
    c2.dt = 1.0 / 512;
    c2.picard_tol = 1e-13;
    SolveConfig fine = c2;
    fine.dt = c2.dt / 16;
    const Trajectory a = solve(u0, c2), r = solve(u0, fine);
    for (std::size_t k = 0; k < a.states.size(); ++k) REQUIRE(sup_diff(a.states[k], r.states[k]) < 1e-6);
  }
  SECTION("errors") {
    SolveConfig bad = cfg;
    bad.alpha = 2.5;
    REQUIRE_THROWS_AS(solve(u0, bad), DomainError);
    bad = cfg;
    bad.s = 0.5;
    REQUIRE_THROWS_AS(solve(u0, bad), DomainError);
    bad = cfg;
    bad.eta = {1.0, 0.0};
    REQUIRE_THROWS_AS(solve(u0, bad), DomainError);
    REQUIRE_THROWS_AS(solve(bump(make_grid(1, 128, 16.0)), cfg), DomainError);
  }
}

TEST_CASE("large-time decay of the sup norm") {
  SolveConfig cfg;
  cfg.alpha = 1.5;
  cfg.grid = make_grid(1, 4096, 512.0);
  cfg.dt = 0.125;
  cfg.horizon = 40.0;
  cfg.snapshots = 81;
  const Trajectory tr = solve(bump(cfg.grid, 0.1), cfg);
  std::vector<double> inv_t, peak;
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    if (tr.times[k] >= 5.0) {
      inv_t.push_back(1.0 / tr.times[k]);
      peak.push_back(tr.diagnostics[k].linf);
    }
  REQUIRE(fit_rate(inv_t, peak).slope == Approx(1.0 / cfg.alpha).margin(0.1));
}

TEST_CASE("uniform bound probe") {
  SolveConfig cfg = small_config();
  auto datum = [&](double) { return bump(cfg.grid, 0.8); };
  REQUIRE_THROWS_AS(uniform_hs_bound_probe(cfg, {}, datum, 0.5), DomainError);
  const UniformProbe p = uniform_hs_bound_probe(cfg, {1.3, 1.5, 1.7, 1.9, 1.99}, datum, 0.5, 2);
  REQUIRE(p.sups.size() == 5);
  REQUIRE(p.spread <= 2.0);
  cfg.eta = {0.0};
  const Field u0 = datum(2.0);
  std::vector<complex> sq(u0.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = u0[i] * u0[i];
  const double at_zero = hs_norm(forward_transform(Field(u0.grid(), sq, Representation::physical)), cfg.s);
  const UniformProbe lin = uniform_hs_bound_probe(cfg, {1.3, 1.6, 1.9}, datum, 0.5);
  for (double v : lin.sups) REQUIRE(v == Approx(at_zero).epsilon(1e-12));
}

TEST_CASE("scheme constant calibration reproduces the default") {
  const Calibration cal = calibrate_scheme_constant();
  REQUIRE(cal.constant == default_scheme_constant);
  REQUIRE(cal.entries.size() == 18);
  for (const auto& e : cal.entries) {
    REQUIRE(e.contracted);
    REQUIRE(e.worst_ratio <= 0.5);
  }
  const auto below = calibration_matrix(default_scheme_constant / 2);
  REQUIRE(std::any_of(below.begin(), below.end(), [](const auto& e) { return !e.contracted; }));
}
