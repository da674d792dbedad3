#pragma once

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <tuple>
#include <vector>

#include "fracheat/grid.hpp"

namespace fracheat {

// Transform convention (fixed for the whole library):
//
//   u^(xi_j) = (dx / sqrt(2 pi))^n  sum_k u(x_k) exp(-i xi_j . x_k)
//   u(x_k)   = (dxi / sqrt(2 pi))^n sum_j u^(xi_j) exp(+i xi_j . x_k)
//
// with x_k = -L + k dx, so coefficients approximate the unitary continuous
// Fourier transform. Plancherel holds with weights dx^n and dxi^n, and the
// convolution p * u has coefficients (2 pi)^{n/2} p^ u^.

namespace detail {

class PlanCache {
public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  // In-place plans created with FFTW_UNALIGNED so any buffer may be used
  // through the new-array execute interface, which is thread safe.
  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(dim, n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second.get();
    const std::size_t total = dim == 1 ? n : static_cast<std::size_t>(n) * n;
    std::vector<fftw_complex> scratch(total);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = dim == 1 ? fftw_plan_dft_1d(n, scratch.data(), scratch.data(), sign, flags)
                           : fftw_plan_dft_2d(n, n, scratch.data(), scratch.data(), sign, flags);
    plans_.emplace(key, Plan(p, &fftw_destroy_plan));
    return p;
  }

private:
  using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, decltype(&fftw_destroy_plan)>;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, Plan> plans_;
};

inline void execute(const Grid& g, std::span<complex> data, int sign) {
  fftw_plan p = PlanCache::instance().get(g.dim(), g.points_per_axis(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, buf, buf);
}

// (-1)^(j0 + j1) from the shift x_0 = -L.
inline double shift_sign(const Grid& g, std::size_t flat) {
  const int n = g.points_per_axis();
  const std::size_t s = g.dim() == 1 ? flat : flat / n + flat % n;
  return (s & 1u) ? -1.0 : 1.0;
}

}  // namespace detail

/// In-place forward transform of physical samples into coefficients.
inline void forward_in_place(const Grid& g, std::span<complex> data) {
  detail::execute(g, data, FFTW_FORWARD);
  const double scale = std::pow(g.spacing() / std::sqrt(2.0 * std::numbers::pi), g.dim());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= scale * detail::shift_sign(g, i);
}

/// In-place inverse transform of coefficients into physical samples.
inline void inverse_in_place(const Grid& g, std::span<complex> data) {
  const double scale =
      std::pow(g.wavenumber_spacing() / std::sqrt(2.0 * std::numbers::pi), g.dim());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= scale * detail::shift_sign(g, i);
  detail::execute(g, data, FFTW_BACKWARD);
}

inline Field forward_transform(const Field& f) {
  f.require(Representation::physical, "forward_transform");
  std::vector<complex> v(f.values().begin(), f.values().end());
  forward_in_place(f.grid(), v);
  return Field(f.grid(), std::move(v), Representation::spectral);
}

inline Field inverse_transform(const Field& f) {
  f.require(Representation::spectral, "inverse_transform");
  std::vector<complex> v(f.values().begin(), f.values().end());
  inverse_in_place(f.grid(), v);
  return Field(f.grid(), std::move(v), Representation::physical);
}

inline Field to_spectral(const Field& f) { return f.is_spectral() ? f : forward_transform(f); }
inline Field to_physical(const Field& f) { return f.is_physical() ? f : inverse_transform(f); }

/// Physical field with imaginary parts dropped.
inline Field real_part(const Field& f) {
  f.require(Representation::physical, "real_part");
  std::vector<complex> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[i].real();
  return Field(f.grid(), std::move(v), Representation::physical);
}

/// Largest Hermitian-symmetry defect |u^(xi) - conj u^(-xi)| relative to the
/// largest coefficient; the unpaired Nyquist modes are skipped.
inline double hermitian_defect(const Field& f) {
  f.require(Representation::spectral, "hermitian_defect");
  const Grid& g = f.grid();
  const int n = g.points_per_axis();
  auto mirror = [n](int i) { return i == 0 ? 0 : n - i; };
  double peak = 0.0, defect = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) peak = std::max(peak, std::abs(f[i]));
  for (std::size_t i = 0; i < f.size(); ++i) {
    bool nyquist = false;
    for (int a = 0; a < g.dim(); ++a) nyquist |= g.lattice_index(a, i) == -n / 2;
    if (nyquist) continue;
    std::size_t j;
    if (g.dim() == 1) {
      j = mirror(static_cast<int>(i));
    } else {
      j = static_cast<std::size_t>(mirror(static_cast<int>(i / n))) * n + mirror(static_cast<int>(i % n));
    }
    defect = std::max(defect, std::abs(f[i] - std::conj(f[j])));
  }
  return peak > 0.0 ? defect / peak : 0.0;
}

}  // namespace fracheat
