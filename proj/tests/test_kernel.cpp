#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fracheat/kernel.hpp"
#include "fracheat/norms.hpp"
#include "fracheat/rate_fit.hpp"

using namespace fracheat;
using Catch::Approx;

namespace {

double heat_1d(double t, double x) { return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t); }

double sup_rel(const Field& a, const std::vector<double>& b) {
  double m = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i].real() - b[i]));
    peak = std::max(peak, std::abs(b[i]));
  }
  return m / peak;
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// log-log slope of y against t
double loglog_slope(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> inv(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) inv[i] = 1.0 / t[i];
  return -fit_rate(inv, y).slope;
}

}  // namespace

TEST_CASE("symbol values") {
  REQUIRE(symbol({1.5, 1.0}, 0.0) == 1.0);
  REQUIRE(symbol({1.5, 1.0}, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-15));
  REQUIRE(symbol({2.0, 0.5}, 2.0) == Approx(std::exp(-2.0)).epsilon(1e-15));
  REQUIRE_THROWS_AS(symbol({2.5, 1.0}, 1.0), DomainError);
  REQUIRE_THROWS_AS(symbol({1.0, 1.0}, 1.0), DomainError);
  REQUIRE_THROWS_AS(symbol({1.5, 0.0}, 1.0), DomainError);
}

TEST_CASE("symbol table is radially nonincreasing in (0, 1]") {
  const Grid g = make_grid(2, 32, 4.0);
  const SymbolTable tab = make_symbol_table({1.7, 0.3}, g);
  REQUIRE(tab.multiplier[0] == 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    REQUIRE(tab.multiplier[i] > 0.0);
    REQUIRE(tab.multiplier[i] <= 1.0);
    for (std::size_t j = 0; j < g.size(); ++j)
      if (g.xi_norm_sq(j) > g.xi_norm_sq(i)) REQUIRE(tab.multiplier[j] <= tab.multiplier[i]);
  }
}

TEST_CASE("alpha = 2 kernel is the Gaussian heat kernel") {
  const Grid g = make_grid(1, 1024, 40.0);
  for (double t : {0.1, 1.0, 5.0}) {
    const Field k = kernel_field({2.0, t}, g);
    std::vector<double> exact(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) exact[i] = heat_1d(t, g.x(0, i));
    REQUIRE(sup_rel(k, exact) < 1e-8);
  }
  const Grid g2 = make_grid(2, 128, 12.0);
  const Field k2 = kernel_field({2.0, 0.5}, g2);
  std::vector<double> exact2(g2.size());
  for (std::size_t i = 0; i < g2.size(); ++i) exact2[i] = heat_1d(0.5, g2.x(0, i)) * heat_1d(0.5, g2.x(1, i));
  REQUIRE(sup_rel(k2, exact2) < 1e-8);
}

TEST_CASE("under-resolved kernel is rejected") {
  const Grid g = make_grid(1, 64, 32.0);
  REQUIRE_THROWS_AS(kernel_field({1.5, 0.01}, g), UnderResolvedKernel);
  REQUIRE_THROWS_AS(gradient_kernel_field({1.5, 0.01}, g, 0), UnderResolvedKernel);
}

TEST_CASE("kernel mass and positivity") {
  const Grid g = make_grid(1, 8192, 64.0);
  for (double alpha : {1.1, 1.5, 1.9, 2.0})
    for (double t : {0.1, 1.0, 10.0}) {
      const Field k = kernel_field({alpha, t}, g);
      REQUIRE(lp_norm(k, 1.0) == Approx(1.0).margin(1e-8));
      double peak = 0.0, low = 0.0;
      for (const auto& v : k.values()) {
        peak = std::max(peak, v.real());
        low = std::min(low, v.real());
      }
      REQUIRE(low > -1e-12 * peak);
    }
  const Field k = kernel_field({1.5, 1.0}, make_grid(1, 2048, 64.0));
  for (const auto& v : k.values()) REQUIRE(v.real() > 0.0);
}

TEST_CASE("kernel tail decays like |x|^-(1+alpha)") {
  const Grid g = make_grid(1, 8192, 512.0);
  for (double alpha : {1.1, 1.5}) {
    const Field k = kernel_field({alpha, 1.0}, g);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double xi = g.x(0, i);
      if (xi >= 32.0 && xi <= 64.0) {
        x.push_back(1.0 / xi);
        y.push_back(k[i].real());
      }
    }
    REQUIRE(fit_rate(x, y).slope == Approx(1.0 + alpha).margin(0.05));
  }
}

TEST_CASE("gradient kernel at alpha = 2 is the Gaussian derivative") {
  const Grid g = make_grid(1, 1024, 40.0);
  const double t = 0.7;
  const Field k = gradient_kernel_field({2.0, t}, g, 0);
  std::vector<double> exact(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) exact[i] = -g.x(0, i) / (2.0 * t) * heat_1d(t, g.x(0, i));
  REQUIRE(sup_rel(k, exact) < 1e-8);
}

TEST_CASE("gradient kernel L1 norm scales like t^(-1/alpha)") {
  const Grid g = make_grid(1, 8192, 256.0);
  for (double alpha : {1.3, 1.6, 2.0}) {
    std::vector<double> ts{0.5, 1.0, 2.0, 4.0, 8.0}, l1;
    for (double t : ts) l1.push_back(lp_norm(gradient_kernel_field({alpha, t}, g, 0), 1.0));
    REQUIRE(loglog_slope(ts, l1) == Approx(-1.0 / alpha).margin(0.05));
  }
}

TEST_CASE("self similarity") {
  const Grid g = make_grid(1, 8192, 1024.0);
  REQUIRE(self_similarity_check(1.5, 1.0, g) == 0.0);
  REQUIRE(self_similarity_check(2.0, 4.0, g) <= 1e-6);
  REQUIRE(self_similarity_check(1.5, 2.0, g) <= 1e-6);
  const Grid g2 = make_grid(2, 128, 24.0);
  REQUIRE(self_similarity_check(2.0, 2.0, g2) <= 1e-6);
}

TEST_CASE("semigroup application") {
  const Grid g = make_grid(1, 256, 12.0);
  const Field u = Field::sample(g, [](double x) { return std::exp(-x * x) * (1.0 + std::sin(3.0 * x)); });
  const KernelSpec a{1.6, 0.3}, b{1.6, 0.45}, ab{1.6, 0.75};

  SECTION("semigroup law") {
    REQUIRE(max_abs_diff(apply_semigroup(apply_semigroup(u, a), b), apply_semigroup(u, ab)) < 1e-12);
  }
  SECTION("vanishing time is the identity") {
    REQUIRE(max_abs_diff(apply_semigroup(u, {1.6, 1e-300}), u) < 1e-14);
  }
  SECTION("linearity and representation") {
    std::vector<complex> w(g.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 2.0 * u[i] - std::cos(g.x(0, i));
    const Field lhs = apply_semigroup(Field(g, w, Representation::physical), a);
    const Field pu = apply_semigroup(u, a);
    const Field pc = apply_semigroup(Field::sample(g, [](double x) { return std::cos(x); }), a);
    for (std::size_t i = 0; i < w.size(); ++i) REQUIRE(std::abs(lhs[i] - (2.0 * pu[i] - pc[i])) < 1e-13);
    const Field spec = apply_semigroup(forward_transform(u), a);
    REQUIRE(spec.is_spectral());
    REQUIRE(max_abs_diff(inverse_transform(spec), pu) < 1e-14);
  }
  SECTION("convolution with the physical kernel") {
    const Grid gk = make_grid(1, 256, 12.0);
    const Field k = kernel_field({2.0, 0.5}, gk);
    const Field pu = apply_semigroup(u, {2.0, 0.5});
    // periodic discrete convolution at one point
    const std::size_t i0 = 100;
    const int n = gk.points_per_axis();
    complex acc = 0.0;
    for (int j = 0; j < n; ++j) {
      int d = static_cast<int>(i0) - j + n / 2;  // x_i - x_j + L in index units
      d = ((d % n) + n) % n;
      acc += k[d] * u[j];
    }
    REQUIRE(std::abs(acc * gk.spacing() - pu[i0]) < 1e-12);
  }
}

TEST_CASE("smoothing estimate with the exact multiplier constant") {
  const Grid g = make_grid(1, 512, 16.0);
  const Field uh = forward_transform(Field::sample(g, [](double x) { return std::exp(-4.0 * x * x); }));
  const double alpha = 1.5, s1 = 0.5;
  for (double s2 : {0.5, 1.0, 2.0})
    for (double t : {0.01, 0.1, 1.0}) {
      const double c = std::pow(s2 / (alpha * std::numbers::e), s2 / alpha);
      const double lhs = sobolev_norm(apply_semigroup(uh, {alpha, t}), s1 + s2, SobolevFlavor::homogeneous);
      const double rhs = c * std::pow(t, -s2 / alpha) * sobolev_norm(uh, s1, SobolevFlavor::homogeneous);
      REQUIRE(lhs <= rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("gradient semigroup") {
  const Grid g = make_grid(1, 512, 20.0);
  const Field one = Field::sample(g, [](double) { return 3.0; });
  for (const auto& v : apply_gradient_semigroup(one, {1.5, 0.2}, 0).values()) REQUIRE(std::abs(v) < 1e-14);

  // e^{-x^2/2} under the heat flow has variance 1 + 2t
  const double t = 0.4, v2 = 1.0 + 2.0 * t;
  const Field u = Field::sample(g, [](double x) { return std::exp(-0.5 * x * x); });
  const Field du = apply_gradient_semigroup(u, {2.0, t}, 0);
  std::vector<double> exact(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(0, i);
    exact[i] = -x / v2 * std::exp(-0.5 * x * x / v2) / std::sqrt(v2);
  }
  REQUIRE(sup_rel(du, exact) < 1e-8);
  for (const auto& v : du.values()) REQUIRE(std::abs(v.imag()) < 1e-14);
  REQUIRE_THROWS_AS(apply_gradient_semigroup(u, {2.0, t}, 1), DomainError);

  const Grid g2 = make_grid(2, 64, 10.0);
  const Field w = Field::sample(g2, [](double x, double y) { return std::exp(-0.5 * (x * x + y * y)); });
  const Field dy = apply_gradient_semigroup(w, {2.0, t}, 1);
  double err = 0.0;
  for (std::size_t i = 0; i < g2.size(); ++i) {
    const double x = g2.x(0, i), y = g2.x(1, i);
    err = std::max(err, std::abs(dy[i].real() + y / (v2 * v2) * std::exp(-0.5 * (x * x + y * y) / v2)));
  }
  REQUIRE(err < 1e-8);
}
