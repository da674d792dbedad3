#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fracheat/hs_distance.hpp"

using namespace fracheat;
using Catch::Approx;

namespace {

// Brute-force trapezoid of the radial integrand on [0, R].
double brute_distance(double alpha, double t, double s, int dim, double g, double R, long points) {
  const double h = R / points;
  double sum = 0.0;
  for (long i = 0; i <= points; ++i) {
    const double r = i * h;
    const double d = std::exp(-t * std::pow(r, alpha)) - std::exp(-t * r * r);
    const double jac = dim == 1 ? 2.0 : 2.0 * std::numbers::pi * r;
    const double v = jac * d * d * std::pow(r, 2.0 * g) * std::pow(1.0 + r * r, -s);
    sum += (i == 0 || i == points) ? 0.5 * v : v;
  }
  return std::sqrt(sum * h);
}

const std::vector<double> sweep{1.8, 1.9, 1.95, 1.975};

}  // namespace

TEST_CASE("distance vanishes at alpha = 2 and t = 0") {
  const QuadratureSpec q{};
  REQUIRE(kernel_hs_distance(2.0, 1.0, 1.0, q) == 0.0);
  REQUIRE(kernel_hs_distance(1.5, 0.0, 1.0, q) == 0.0);
  REQUIRE(kernel_hs_distance(1.5, 0.0, 2.0, q, KernelDifference::gradient) == 0.0);
}

TEST_CASE("distance preconditions") {
  QuadratureSpec q{};
  REQUIRE_THROWS_AS(kernel_hs_distance(1.5, 1.0, 0.5, q), DomainError);
  REQUIRE_THROWS_AS(kernel_hs_distance(1.5, 1.0, 1.5, q, KernelDifference::gradient), DomainError);
  REQUIRE_THROWS_AS(kernel_hs_distance(1.5, -1.0, 1.0, q), DomainError);
  REQUIRE_THROWS_AS(kernel_hs_distance(2.5, 1.0, 1.0, q), DomainError);
  q.dim = 2;
  REQUIRE_THROWS_AS(kernel_hs_distance(1.5, 1.0, 1.0, q), DomainError);
  REQUIRE_NOTHROW(kernel_hs_distance(1.5, 1.0, 1.01, q));
}

TEST_CASE("distance agrees with a brute-force trapezoid") {
  const QuadratureSpec q1{};
  const double v = kernel_hs_distance(1.9, 1.0, 1.0, q1);
  REQUIRE(v == Approx(brute_distance(1.9, 1.0, 1.0, 1, 0.0, 200.0, 10'000'000)).epsilon(1e-6));

  const double vg = kernel_hs_distance(1.7, 0.3, 2.0, q1, KernelDifference::gradient);
  REQUIRE(vg == Approx(brute_distance(1.7, 0.3, 2.0, 1, 1.0, 200.0, 2'000'000)).epsilon(1e-6));

  QuadratureSpec q2{};
  q2.dim = 2;
  const double v2 = kernel_hs_distance(1.8, 0.5, 1.5, q2);
  REQUIRE(v2 == Approx(brute_distance(1.8, 0.5, 1.5, 2, 0.0, 200.0, 2'000'000)).epsilon(1e-6));
}

TEST_CASE("distance at small t needs the far tail") {
  // at t = 1e-3 the gap is concentrated near |xi| ~ 1e3 / 2; the panel
  // scheme must follow it out, the oracle uses a wide window.
  const double v = kernel_hs_distance(1.9, 1e-3, 1.0, {});
  REQUIRE(v == Approx(brute_distance(1.9, 1e-3, 1.0, 1, 0.0, 2e5, 20'000'000)).epsilon(1e-5));
}

TEST_CASE("gradient distance in H^-1 grows without bound as t -> 0") {
  // with weight |xi|^2 (1+|xi|^2)^-1 the integrand does not decay, so the
  // sup over t of the gradient distance is infinite at s = 1
  std::vector<double> vals;
  for (double t : {1e-1, 1e-2, 1e-3}) {
    const double R = std::pow(60.0 / t, 1.0 / 1.8);
    vals.push_back(brute_distance(1.8, t, 1.0, 1, 1.0, R, 4'000'000));
  }
  REQUIRE(vals[1] > 1.5 * vals[0]);
  REQUIRE(vals[2] > 1.5 * vals[1]);
}

TEST_CASE("distance decreases as alpha approaches 2") {
  const QuadratureSpec q{};
  for (double t : {0.05, 0.5, 1.0}) {
    double prev = kernel_hs_distance(1.3, t, 1.0, q);
    for (double a = 1.35; a < 2.0; a += 0.05) {
      const double v = kernel_hs_distance(a, t, 1.0, q);
      REQUIRE(v <= prev + 1e-10);
      prev = v;
    }
  }
}

TEST_CASE("kernel rate sweep has slope one") {
  const KernelSweep ks = kernel_rate_sweep(sweep, 1.0, 1.0);
  REQUIRE(ks.fit.slope >= 0.9);
  REQUIRE(ks.fit.slope <= 1.1);
  REQUIRE(ks.fit.abscissae.size() == 4);
  for (const auto& sp : ks.sups) {
    REQUIRE(sp.time > 0.0);
    REQUIRE(sp.time <= 1.0);
  }
  const KernelSweep grad = kernel_rate_sweep(sweep, 1.0, 2.0, {}, KernelDifference::gradient);
  REQUIRE(grad.fit.slope >= 0.9);
  REQUIRE(grad.fit.slope <= 1.1);
}

TEST_CASE("sweep is order independent and deterministic") {
  const KernelSweep a = kernel_rate_sweep({1.975, 1.8, 1.95, 1.9}, 1.0, 1.0);
  const KernelSweep b = kernel_rate_sweep({1.8, 1.9, 1.95, 1.975}, 1.0, 1.0, {}, KernelDifference::value, 3);
  REQUIRE(a.fit.slope == b.fit.slope);
  REQUIRE(a.fit.intercept == b.fit.intercept);
  REQUIRE(a.alphas == b.alphas);
}

TEST_CASE("degenerate sweeps are rejected") {
  REQUIRE_THROWS_AS(kernel_rate_sweep({1.9}, 1.0, 1.0), DomainError);
  REQUIRE_THROWS_AS(kernel_rate_sweep({1.9, 1.9, 1.95}, 1.0, 1.0), DomainError);
  REQUIRE_THROWS_AS(kernel_rate_sweep({1.9, 1.95, 2.0}, 1.0, 1.0), DomainError);
}

TEST_CASE("fprime vanishes at xi = 0 and xi = 1") {
  const FprimeBound z = fprime_bound_check(2.1, 1.0, {0.0, 1.0, -1.0});
  REQUIRE(z.sup_small == 0.0);
  REQUIRE(z.sup_large == 0.0);
  REQUIRE(fprime_sup_over_alpha(1.0, 0.3, 1.0, 2.1) == 0.0);
}

TEST_CASE("fprime analytic sup matches a brute-force (xi, alpha) grid") {
  for (double t1 : {0.1, 1.0}) {
    std::vector<double> xi;
    for (int i = 1; i <= 5000; ++i) xi.push_back(50.0 * i / 5000);
    const FprimeBound fb = fprime_bound_check(2.1, t1, xi);
    double small = 0.0, large = 0.0;
    for (double x : xi)
      for (int k = 0; k <= 2000; ++k) {
        const double a = 1.0 + 1.1 * k / 2000;
        const double v = std::abs(t1 * std::exp(-t1 * std::pow(x, a)) * std::pow(x, a) * std::log(x));
        (x <= 1.0 ? small : large) = std::max(x <= 1.0 ? small : large, v);
      }
    REQUIRE(fb.sup_small == Approx(small).epsilon(1e-5));
    REQUIRE(fb.sup_large == Approx(large).epsilon(1e-5));
    REQUIRE(std::isfinite(fb.constant));
    REQUIRE(fb.constant == Approx(std::max(fb.sup_small, fb.sup_large) / t1));
  }
}

TEST_CASE("fprime constant is stable under xi refinement") {
  auto constant = [](int points) {
    std::vector<double> xi;
    for (int i = 1; i <= points; ++i) xi.push_back(50.0 * i / points);
    return fprime_bound_check(2.1, 1.0, xi).constant;
  };
  const double c1 = constant(500), c2 = constant(1000), c3 = constant(2000);
  REQUIRE(c2 == Approx(c1).epsilon(0.01));
  REQUIRE(c3 == Approx(c2).epsilon(0.01));
}
