#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "fracheat/errors.hpp"
#include "fracheat/kernel.hpp"
#include "fracheat/parallel.hpp"
#include "fracheat/rate_fit.hpp"

namespace fracheat {

/// Controls the radial quadrature of kernel_hs_distance.
struct QuadratureSpec {
  int dim = 1;
  double rel_tol = 1e-10;
  int max_panels = 400;
  unsigned max_depth = 15;
};

/// Which kernel difference is measured: p - h itself or its gradient.
enum class KernelDifference { value, gradient };

inline const char* to_string(KernelDifference d) {
  return d == KernelDifference::value ? "value" : "gradient";
}

/// Smallest admissible s for the integral to converge: s > n/2 for the plain
/// difference and s > n/2 + 1 for the gradient, whose sup over t is otherwise
/// infinite (the integrand loses all decay as t -> 0+).
inline double hs_distance_min_s(int dim, KernelDifference diff) {
  return 0.5 * dim + (diff == KernelDifference::gradient ? 1.0 : 0.0);
}

namespace detail {

inline double symbol_gap(double alpha, double t, double r) {
  // e^{-t r^a} - e^{-t r^2}, written to avoid cancellation near r = 1 and r = 0
  const double ra = std::pow(r, alpha);
  return std::exp(-t * ra) * -std::expm1(-t * (r * r - ra));
}

}  // namespace detail

/// ( int_{R^n} |e^{-t|xi|^a} - e^{-t|xi|^2}|^2 |xi|^{2g} (1+|xi|^2)^{-s} dxi )^{1/2}
/// with g = 0 (value) or g = 1 (gradient), reduced to a radial integral and
/// integrated panel by panel on [0,1], [1,2], [2,4], ... until an analytic
/// tail bound drops below the tolerance.
inline double kernel_hs_distance(double alpha, double t, double s, const QuadratureSpec& quad,
                                 KernelDifference diff = KernelDifference::value) {
  if (quad.dim != 1 && quad.dim != 2) throw DomainError("kernel_hs_distance: dim must be 1 or 2");
  if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("kernel_hs_distance: alpha must lie in (1, 2]");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("kernel_hs_distance: t must be >= 0");
  const double s_min = hs_distance_min_s(quad.dim, diff);
  if (!(s > s_min))
    throw DomainError("kernel_hs_distance: s must exceed " + std::to_string(s_min) +
                      " for the integral to converge");
  if (!(quad.rel_tol > 0.0)) throw DomainError("kernel_hs_distance: rel_tol must be positive");
  if (t == 0.0 || alpha == 2.0) return 0.0;

  const int n = quad.dim;
  const double g = diff == KernelDifference::gradient ? 1.0 : 0.0;
  const double omega = n == 1 ? 2.0 : 2.0 * std::numbers::pi;
  auto integrand = [=](double r) {
    if (r == 0.0) return 0.0;
    const double d = detail::symbol_gap(alpha, t, r);
    const double jac = n == 1 ? 1.0 : r;
    return omega * jac * d * d * std::pow(r, 2.0 * g) * std::pow(1.0 + r * r, -s);
  };
  // For r >= 1 the gap is bounded by e^{-t r^a} and (1+r^2)^{-s} <= r^{-2s}.
  const double decay = 2.0 * s - n - 2.0 * g;
  auto tail_bound = [=](double xi) {
    return omega * std::exp(-2.0 * t * std::pow(xi, alpha)) * std::pow(xi, -decay) / decay;
  };

  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double total = 0.0, error = 0.0, abs_total = 0.0;
  double a = 0.0, b = 1.0;
  for (int panel = 0;; ++panel) {
    if (panel >= quad.max_panels)
      throw QuadratureError("kernel_hs_distance: tail did not fall below tolerance");
    double err = 0.0, l1 = 0.0;
    total += GK::integrate(integrand, a, b, quad.max_depth, quad.rel_tol, &err, &l1);
    error += err;
    abs_total += l1;
    if (total > 0.0 && tail_bound(b) <= quad.rel_tol * total) break;
    a = b;
    b *= 2.0;
  }
  if (!std::isfinite(total) || error > 100.0 * quad.rel_tol * abs_total + 1e-300)
    throw QuadratureError("kernel_hs_distance: panel quadrature did not converge");
  return std::sqrt(total);
}

/// Location and value of sup_{0<=t<=T} kernel_hs_distance(alpha, t, s).
struct SupSample {
  double value;
  double time;
};

/// Maximizes kernel_hs_distance over t in [0, T] from 64 uniform samples
/// followed by golden-section refinement around the best sample.
inline SupSample kernel_sup_distance(double alpha, double T, double s, const QuadratureSpec& quad,
                                     KernelDifference diff = KernelDifference::value) {
  if (!(T > 0.0)) throw DomainError("kernel_sup_distance: T must be positive");
  constexpr int samples = 64;
  auto f = [&](double t) { return kernel_hs_distance(alpha, t, s, quad, diff); };
  SupSample best{-1.0, 0.0};
  int arg = 0;
  for (int i = 0; i < samples; ++i) {
    const double t = T * i / (samples - 1);
    const double v = f(t);
    if (v > best.value) {
      best = {v, t};
      arg = i;
    }
  }
  double lo = T * std::max(arg - 1, 0) / (samples - 1);
  double hi = T * std::min(arg + 1, samples - 1) / (samples - 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(T, hi); ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  if (fc > best.value) best = {fc, c};
  if (fd > best.value) best = {fd, d};
  return best;
}

/// Per-alpha sup distances and their log-log fit against 2 - alpha.
struct KernelSweep {
  std::vector<double> alphas;  ///< ascending
  std::vector<SupSample> sups;
  RateFit fit;
};

inline KernelSweep kernel_rate_sweep(std::vector<double> alphas, double T, double s,
                                     const QuadratureSpec& quad = {},
                                     KernelDifference diff = KernelDifference::value, int threads = 1) {
  if (std::set<double>(alphas.begin(), alphas.end()).size() < 3)
    throw DomainError("kernel_rate_sweep: need at least 3 distinct alpha values");
  for (double a : alphas)
    if (!(a > 1.0 && a < 2.0)) throw DomainError("kernel_rate_sweep: every alpha must lie in (1, 2)");
  std::sort(alphas.begin(), alphas.end());
  KernelSweep out;
  out.alphas = alphas;
  out.sups.resize(alphas.size());
  parallel_for(alphas.size(), threads,
               [&](std::size_t i) { out.sups[i] = kernel_sup_distance(alphas[i], T, s, quad, diff); });
  std::vector<double> x(alphas.size()), e(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    x[i] = 2.0 - alphas[i];
    e[i] = out.sups[i].value;
  }
  out.fit = fit_rate(x, e, diff == KernelDifference::value ? "kernel_hs" : "grad_kernel_hs");
  return out;
}

/// Suprema of |d/d alpha e^{-t1 |xi|^alpha}| over alpha in [1, alpha_max],
/// split into |xi| <= 1 and |xi| > 1, and the ratio max / t1.
struct FprimeBound {
  double sup_small = 0.0;
  double sup_large = 0.0;
  double xi_small = 0.0;  ///< argmax in |xi| <= 1
  double xi_large = 0.0;  ///< argmax in |xi| > 1
  double constant = 0.0;  ///< max(sup_small, sup_large) / t1
};

/// sup over alpha of |f'_xi(alpha)| = |ln xi| y e^{-y} with y = t1 xi^alpha.
/// For fixed xi, y is monotone in alpha, so the sup is attained at y = 1
/// when it lies in the reachable range and at the nearer end otherwise.
inline double fprime_sup_over_alpha(double xi, double t1, double alpha_lo, double alpha_hi) {
  xi = std::abs(xi);
  if (xi == 0.0 || xi == 1.0) return 0.0;
  const double y1 = t1 * std::pow(xi, alpha_lo), y2 = t1 * std::pow(xi, alpha_hi);
  const double y = std::clamp(1.0, std::min(y1, y2), std::max(y1, y2));
  return std::abs(std::log(xi)) * y * std::exp(-y);
}

inline FprimeBound fprime_bound_check(double alpha_max, double t1, const std::vector<double>& xi_grid) {
  if (!(t1 > 0.0) || !std::isfinite(t1)) throw DomainError("fprime_bound_check: t1 must be positive");
  if (!(alpha_max >= 2.0)) throw DomainError("fprime_bound_check: alpha_max must be >= 2");
  FprimeBound out;
  for (double xi : xi_grid) {
    const double v = fprime_sup_over_alpha(xi, t1, 1.0, alpha_max);
    if (std::abs(xi) <= 1.0) {
      if (v > out.sup_small) out.sup_small = v, out.xi_small = xi;
    } else if (v > out.sup_large) {
      out.sup_large = v, out.xi_large = xi;
    }
  }
  out.constant = std::max(out.sup_small, out.sup_large) / t1;
  return out;
}

}  // namespace fracheat
