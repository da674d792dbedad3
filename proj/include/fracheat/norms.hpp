#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracheat/grid.hpp"

namespace fracheat {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Discrete L^p norm (sum |u_k|^p dx^n)^(1/p); grid maximum for p = inf.
inline double lp_norm(const Field& f, double p) {
  f.require(Representation::physical, "lp_norm");
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be in [1, inf]");
  if (p == infinity) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  if (p == 1.0) {
    for (const auto& v : f.values()) sum += std::abs(v);
    return sum * f.grid().cell_volume();
  }
  if (p == 2.0) {
    for (const auto& v : f.values()) sum += std::norm(v);
    return std::sqrt(sum * f.grid().cell_volume());
  }
  for (const auto& v : f.values()) sum += std::pow(std::abs(v), p);
  return std::pow(sum * f.grid().cell_volume(), 1.0 / p);
}

enum class SobolevFlavor {
  inhomogeneous,  ///< weight (1 + |xi|^2)^s
  homogeneous,    ///< weight |xi|^(2s)
  negative,       ///< weight (1 + |xi|^2)^(-s), i.e. the H^{-s} norm
};

/// Sobolev norm (sum w(xi) |u^(xi)|^2 dxi^n)^(1/2) of a spectral field. With
/// s = 0 every flavor equals the L^2 norm of the physical field.
inline double sobolev_norm(const Field& f, double s, SobolevFlavor flavor) {
  f.require(Representation::spectral, "sobolev_norm");
  const Grid& g = f.grid();
  double sum = 0.0;
  if (flavor == SobolevFlavor::homogeneous && s < 0.0) {
    double peak = 0.0;
    for (const auto& v : f.values()) peak = std::max(peak, std::abs(v));
    if (std::abs(f[0]) > 1e-12 * peak)
      throw DomainError("sobolev_norm: homogeneous norm with s < 0 needs a vanishing xi = 0 mode");
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double k2 = g.xi_norm_sq(i);
    double w;
    switch (flavor) {
      case SobolevFlavor::inhomogeneous: w = std::pow(1.0 + k2, s); break;
      case SobolevFlavor::negative: w = std::pow(1.0 + k2, -s); break;
      case SobolevFlavor::homogeneous:
        if (k2 == 0.0 && s < 0.0) continue;
        w = std::pow(k2, s);
        break;
    }
    sum += w * std::norm(f[i]);
  }
  return std::sqrt(sum * g.mode_volume());
}

/// Inhomogeneous H^s norm, the default flavor.
inline double hs_norm(const Field& f, double s) {
  return sobolev_norm(f, s, SobolevFlavor::inhomogeneous);
}

}  // namespace fracheat
