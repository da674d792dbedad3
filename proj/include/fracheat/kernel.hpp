#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fracheat/grid.hpp"
#include "fracheat/spectral.hpp"

namespace fracheat {

/// Identifies the semigroup element p_alpha(t, .); alpha = 2 is the heat kernel.
struct KernelSpec {
  double alpha;
  double time;

  void validate() const {
    if (!(alpha > 1.0 && alpha <= 2.0))
      throw DomainError("KernelSpec: alpha must lie in (1, 2], got " + std::to_string(alpha));
    if (!(time > 0.0) || !std::isfinite(time))
      throw DomainError("KernelSpec: time must be positive and finite");
  }
};

/// |xi|^alpha from |xi|^2, exact at alpha = 2.
inline double xi_power(double xi_sq, double alpha) {
  return alpha == 2.0 ? xi_sq : std::pow(xi_sq, 0.5 * alpha);
}

/// Fourier symbol exp(-t |xi|^alpha) of p_alpha(t, .).
inline double symbol(const KernelSpec& spec, double xi_abs) {
  spec.validate();
  return std::exp(-spec.time * xi_power(xi_abs * xi_abs, spec.alpha));
}

/// The multiplier exp(-t |xi|^alpha) tabulated on a grid's lattice.
struct SymbolTable {
  Grid grid;
  std::vector<double> multiplier;
};

inline SymbolTable make_symbol_table(const KernelSpec& spec, const Grid& grid) {
  spec.validate();
  std::vector<double> m(grid.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = std::exp(-spec.time * xi_power(grid.xi_norm_sq(i), spec.alpha));
  return {grid, std::move(m)};
}

inline constexpr double kernel_resolution_guard = 1e-14;

namespace detail {

inline void check_resolved(const KernelSpec& spec, const Grid& grid) {
  const double tail = symbol(spec, grid.max_axis_wavenumber());
  if (tail >= kernel_resolution_guard)
    throw UnderResolvedKernel("kernel_field: symbol at |xi|_max is " + std::to_string(tail) +
                              " (needs < 1e-14); refine the grid or enlarge t");
}

inline Field real_kernel_from_coefficients(const Grid& grid, std::vector<complex> coeff) {
  inverse_in_place(grid, coeff);
  double peak = 0.0, imag = 0.0;
  for (const auto& v : coeff) {
    peak = std::max(peak, std::abs(v.real()));
    imag = std::max(imag, std::abs(v.imag()));
  }
  if (imag > 1e-12 * peak) throw Error("kernel_field: imaginary residue exceeds 1e-12 of peak");
  for (auto& v : coeff) v = v.real();
  return Field(grid, std::move(coeff), Representation::physical);
}

}  // namespace detail

/// p_alpha(t, x_k) on the grid (periodized). Throws UnderResolvedKernel when
/// the symbol has not decayed below 1e-14 at the largest axis wavenumber.
inline Field kernel_field(const KernelSpec& spec, const Grid& grid) {
  spec.validate();
  detail::check_resolved(spec, grid);
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * grid.dim());
  std::vector<complex> coeff(grid.size());
  for (std::size_t i = 0; i < coeff.size(); ++i)
    coeff[i] = norm * std::exp(-spec.time * xi_power(grid.xi_norm_sq(i), spec.alpha));
  return detail::real_kernel_from_coefficients(grid, std::move(coeff));
}

/// d/dx_axis p_alpha(t, .) on the grid. The unpaired Nyquist mode is dropped.
inline Field gradient_kernel_field(const KernelSpec& spec, const Grid& grid, int axis) {
  spec.validate();
  detail::check_resolved(spec, grid);
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * grid.dim());
  const int nyq = -grid.points_per_axis() / 2;
  std::vector<complex> coeff(grid.size());
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    if (grid.lattice_index(axis, i) == nyq) continue;
    coeff[i] = complex(0.0, grid.xi(axis, i)) * norm *
               std::exp(-spec.time * xi_power(grid.xi_norm_sq(i), spec.alpha));
  }
  return detail::real_kernel_from_coefficients(grid, std::move(coeff));
}

/// Spectral multiplication by exp(-t |xi|^alpha). The result keeps the
/// representation of the input.
inline Field apply_semigroup(const Field& u, const KernelSpec& spec) {
  spec.validate();
  const Grid& g = u.grid();
  std::vector<complex> v(u.values().begin(), u.values().end());
  if (u.is_physical()) forward_in_place(g, v);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] *= std::exp(-spec.time * xi_power(g.xi_norm_sq(i), spec.alpha));
  if (u.is_physical()) inverse_in_place(g, v);
  return Field(g, std::move(v), u.representation());
}

/// Spectral multiplication by (i xi_axis) exp(-t |xi|^alpha), i.e. the
/// convolution with d/dx_axis p_alpha(t, .). The Nyquist mode along `axis`
/// is zeroed so real fields stay real.
inline Field apply_gradient_semigroup(const Field& u, const KernelSpec& spec, int axis) {
  spec.validate();
  const Grid& g = u.grid();
  if (axis < 0 || axis >= g.dim()) throw DomainError("apply_gradient_semigroup: bad axis");
  std::vector<complex> v(u.values().begin(), u.values().end());
  if (u.is_physical()) forward_in_place(g, v);
  const int nyq = -g.points_per_axis() / 2;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (g.lattice_index(axis, i) == nyq) {
      v[i] = 0.0;
      continue;
    }
    v[i] *= complex(0.0, g.xi(axis, i)) * std::exp(-spec.time * xi_power(g.xi_norm_sq(i), spec.alpha));
  }
  if (u.is_physical()) inverse_in_place(g, v);
  return Field(g, std::move(v), u.representation());
}

namespace detail {

// row[j] = exp(i xi_j y) for FFT-ordered xi_j = dxi * signed(j); exact
// anchors every 64 entries, complex recurrence in between.
inline void phase_row(const Grid& grid, double y, std::vector<complex>& row) {
  const int n = grid.points_per_axis();
  const double dxi = grid.wavenumber_spacing();
  row.resize(n);
  const complex step = std::polar(1.0, dxi * y);
  complex cur;
  for (int j = 0; j < n; ++j) {
    const int m = j - n / 2;  // ascending index
    cur = (m % 64 == 0 || j == 0) ? std::polar(1.0, dxi * m * y) : cur * step;
    row[m < 0 ? m + n : m] = cur;
  }
}

}  // namespace detail

/// Sup-relative deviation between p_alpha(t, x) and the rescaled profile
/// t^{-n/alpha} P_alpha(x t^{-1/alpha}), where P_alpha = p_alpha(1, .) is
/// evaluated off-grid by exact trigonometric interpolation. Both sides are
/// periodized on the box, so the comparison is restricted to points with
/// |x| <= L/2 and |x t^{-1/alpha}| <= L/2, where periodic images are far.
inline double self_similarity_check(double alpha, double t, const Grid& grid) {
  const Field direct = kernel_field(KernelSpec{alpha, t}, grid);
  const Field profile = kernel_field(KernelSpec{alpha, 1.0}, grid);
  double peak = 0.0;
  for (const auto& v : direct.values()) peak = std::max(peak, std::abs(v.real()));

  const double scale = std::pow(t, -1.0 / alpha);
  const double amplitude = std::pow(t, -static_cast<double>(grid.dim()) / alpha);
  const int n = grid.points_per_axis();
  const double half = 0.5 * grid.half_length();

  std::vector<int> used;  // axis indices inside the comparison window
  for (int k = 0; k < n; ++k) {
    const double x = grid.coordinate(k);
    if (std::abs(x) <= half && std::abs(x * scale) <= half) used.push_back(k);
  }

  std::vector<complex> coeff(profile.values().begin(), profile.values().end());
  if (scale != 1.0) forward_in_place(grid, coeff);
  const double w = grid.wavenumber_spacing() / std::sqrt(2.0 * std::numbers::pi);
  std::vector<complex> row;
  double dev = 0.0;

  if (grid.dim() == 1) {
    for (int k : used) {
      double value = profile[k].real();
      if (scale != 1.0) {
        detail::phase_row(grid, grid.coordinate(k) * scale, row);
        complex acc = 0.0;
        for (int j = 0; j < n; ++j) acc += coeff[j] * row[j];
        value = w * acc.real();
      }
      dev = std::max(dev, std::abs(direct[k].real() - amplitude * value));
    }
    return dev / peak;
  }

  const std::size_t m = used.size();
  std::vector<complex> phase(m * n);  // phase[u * n + j] for axis index used[u]
  if (scale != 1.0) {
    for (std::size_t u = 0; u < m; ++u) {
      detail::phase_row(grid, grid.coordinate(used[u]) * scale, row);
      std::copy(row.begin(), row.end(), phase.begin() + u * n);
    }
  }
  // q[j1 * m + u2] = sum_j2 c[j1][j2] phase[u2][j2]
  std::vector<complex> q(scale != 1.0 ? n * m : 0);
  for (int j1 = 0; j1 < n && scale != 1.0; ++j1)
    for (std::size_t u2 = 0; u2 < m; ++u2) {
      complex acc = 0.0;
      for (int j2 = 0; j2 < n; ++j2) acc += coeff[static_cast<std::size_t>(j1) * n + j2] * phase[u2 * n + j2];
      q[j1 * m + u2] = acc;
    }
  for (std::size_t u1 = 0; u1 < m; ++u1)
    for (std::size_t u2 = 0; u2 < m; ++u2) {
      const std::size_t flat = static_cast<std::size_t>(used[u1]) * n + used[u2];
      double value = profile[flat].real();
      if (scale != 1.0) {
        complex acc = 0.0;
        for (int j1 = 0; j1 < n; ++j1) acc += phase[u1 * n + j1] * q[j1 * m + u2];
        value = w * w * acc.real();
      }
      dev = std::max(dev, std::abs(direct[flat].real() - amplitude * value));
    }
  return dev / peak;
}

}  // namespace fracheat
