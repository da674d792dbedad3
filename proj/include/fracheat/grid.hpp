#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "fracheat/errors.hpp"

namespace fracheat {

using complex = std::complex<double>;

/// Periodic box [-L, L)^n sampled with N points per axis, together with its
/// dual lattice xi_j = (pi / L) j, j in [-N/2, N/2).
///
/// Storage order for all arrays on the grid is row-major with axis 0 the
/// slowest; along each axis wavenumbers are kept in FFT order (0, 1, ...,
/// N/2 - 1, -N/2, ..., -1).
class Grid {
public:
  Grid(int dim, int points_per_axis, double half_length)
      : dim_(dim), n_(points_per_axis), half_length_(half_length) {
    if (dim != 1 && dim != 2)
      throw DomainError("make_grid: dim must be 1 or 2, got " + std::to_string(dim));
    if (points_per_axis < 8 || points_per_axis % 2 != 0)
      throw DomainError("make_grid: points_per_axis must be even and >= 8, got " +
                        std::to_string(points_per_axis));
    if (!(half_length > 0.0) || !std::isfinite(half_length))
      throw DomainError("make_grid: half_length must be positive");
    dx_ = 2.0 * half_length_ / n_;
    dxi_ = std::numbers::pi / half_length_;
    axis_xi_.resize(n_);
    for (int i = 0; i < n_; ++i) axis_xi_[i] = dxi_ * signed_index(i);
  }

  int dim() const noexcept { return dim_; }
  int points_per_axis() const noexcept { return n_; }
  double half_length() const noexcept { return half_length_; }
  double spacing() const noexcept { return dx_; }
  /// Spacing of the dual lattice, pi / L.
  double wavenumber_spacing() const noexcept { return dxi_; }
  std::size_t size() const noexcept {
    return dim_ == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
  }
  /// dx^n, the quadrature weight of one physical sample.
  double cell_volume() const noexcept { return std::pow(dx_, dim_); }
  /// (pi/L)^n, the quadrature weight of one lattice mode.
  double mode_volume() const noexcept { return std::pow(dxi_, dim_); }
  /// Largest |xi| along one axis, (pi / L) (N / 2).
  double max_axis_wavenumber() const noexcept { return dxi_ * (n_ / 2); }

  /// Signed lattice index of FFT-ordered slot i.
  int signed_index(int i) const noexcept { return i < n_ / 2 ? i : i - n_; }
  /// x_k = -L + k dx.
  double coordinate(int k) const noexcept { return -half_length_ + k * dx_; }

  /// Axis wavenumbers in FFT storage order.
  std::span<const double> axis_wavenumbers() const noexcept { return axis_xi_; }

  /// Axis wavenumbers in ascending order, xi_{-N/2}, ..., xi_{N/2-1}.
  std::vector<double> wavenumbers() const {
    std::vector<double> out(n_);
    for (int j = 0; j < n_; ++j) out[j] = dxi_ * (j - n_ / 2);
    return out;
  }

  /// Component `axis` of the wavevector at flat index `flat`.
  double xi(int axis, std::size_t flat) const noexcept {
    if (dim_ == 1) return axis_xi_[flat];
    return axis == 0 ? axis_xi_[flat / n_] : axis_xi_[flat % n_];
  }
  /// Signed lattice index of component `axis` at flat index `flat`.
  int lattice_index(int axis, std::size_t flat) const noexcept {
    if (dim_ == 1) return signed_index(static_cast<int>(flat));
    return signed_index(static_cast<int>(axis == 0 ? flat / n_ : flat % n_));
  }
  double xi_norm_sq(std::size_t flat) const noexcept {
    if (dim_ == 1) return axis_xi_[flat] * axis_xi_[flat];
    const double a = axis_xi_[flat / n_], b = axis_xi_[flat % n_];
    return a * a + b * b;
  }
  double xi_norm(std::size_t flat) const noexcept { return std::sqrt(xi_norm_sq(flat)); }

  /// Physical coordinate `axis` of sample `flat`.
  double x(int axis, std::size_t flat) const noexcept {
    if (dim_ == 1) return coordinate(static_cast<int>(flat));
    return coordinate(static_cast<int>(axis == 0 ? flat / n_ : flat % n_));
  }
  double x_norm(std::size_t flat) const noexcept {
    double r2 = 0.0;
    for (int a = 0; a < dim_; ++a) r2 += x(a, flat) * x(a, flat);
    return std::sqrt(r2);
  }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.half_length_ == b.half_length_;
  }

private:
  int dim_;
  int n_;
  double half_length_;
  double dx_ = 0.0;
  double dxi_ = 0.0;
  std::vector<double> axis_xi_;
};

inline Grid make_grid(int dim, int points_per_axis, double half_length) {
  return Grid(dim, points_per_axis, half_length);
}

enum class Representation { physical, spectral };

inline const char* to_string(Representation r) {
  return r == Representation::physical ? "physical" : "spectral";
}

/// One scalar state on a grid, held either as samples u(x_k) or as
/// coefficients u^(xi_j). Immutable once constructed.
class Field {
public:
  Field(Grid grid, std::vector<complex> values, Representation rep)
      : grid_(std::move(grid)), values_(std::move(values)), rep_(rep) {
    if (values_.size() != grid_.size())
      throw DomainError("Field: value count does not match grid size");
  }

  /// Physical field from real samples.
  static Field from_real(const Grid& grid, std::span<const double> samples) {
    if (samples.size() != grid.size()) throw DomainError("Field: sample count does not match grid size");
    std::vector<complex> v(samples.begin(), samples.end());
    return Field(grid, std::move(v), Representation::physical);
  }

  /// Physical field sampled from f(x) (1D) or f(x, y) (2D).
  template <class F>
  static Field sample(const Grid& grid, F&& f) {
    std::vector<complex> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if constexpr (std::is_invocable_v<F, double>) {
        v[i] = f(grid.x(0, i));
      } else {
        v[i] = f(grid.x(0, i), grid.x(1, i));
      }
    }
    return Field(grid, std::move(v), Representation::physical);
  }

  static Field zeros(const Grid& grid, Representation rep) {
    return Field(grid, std::vector<complex>(grid.size()), rep);
  }

  const Grid& grid() const noexcept { return grid_; }
  Representation representation() const noexcept { return rep_; }
  bool is_physical() const noexcept { return rep_ == Representation::physical; }
  bool is_spectral() const noexcept { return rep_ == Representation::spectral; }
  std::span<const complex> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  const complex& operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Real parts of the values.
  std::vector<double> real() const {
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i].real();
    return out;
  }

  void require(Representation rep, const char* op) const {
    if (rep_ != rep)
      throw RepresentationError(std::string(op) + ": expected " + to_string(rep) + " field, got " +
                                to_string(rep_));
  }

private:
  Grid grid_;
  std::vector<complex> values_;
  Representation rep_;
};

}  // namespace fracheat
