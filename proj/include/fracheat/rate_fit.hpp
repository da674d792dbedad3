#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "fracheat/errors.hpp"

namespace fracheat {

/// Least-squares fit of log(error) against log(2 - alpha).
struct RateFit {
  std::string norm_id;
  std::vector<double> abscissae;  ///< sorted descending, toward 0
  std::vector<double> errors;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> excluded;  ///< abscissae whose error fell below the floor

  double predict(double x) const { return std::exp(intercept) * std::pow(x, slope); }
};

inline constexpr double fit_error_floor = 100.0 * std::numeric_limits<double>::epsilon();

/// Ordinary least squares on (log x, log e). Points are sorted by x descending
/// first, so input order never changes the result; errors below 100 machine
/// epsilon are dropped and listed in `excluded`.
inline RateFit fit_rate(const std::vector<double>& abscissae, const std::vector<double>& errors,
                        std::string norm_id = {}) {
  if (abscissae.size() != errors.size()) throw DomainError("fit_rate: size mismatch");
  std::vector<std::size_t> order(abscissae.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (abscissae[a] != abscissae[b]) return abscissae[a] > abscissae[b];
    return errors[a] > errors[b];
  });

  RateFit fit;
  fit.norm_id = std::move(norm_id);
  for (std::size_t i : order) {
    const double x = abscissae[i], e = errors[i];
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("fit_rate: abscissae must be positive");
    if (!std::isfinite(e)) throw DomainError("fit_rate: non-finite error value");
    if (!(e >= fit_error_floor)) {
      fit.excluded.push_back(x);
      continue;
    }
    fit.abscissae.push_back(x);
    fit.errors.push_back(e);
  }
  const std::size_t m = fit.abscissae.size();
  if (m < 3) throw DomainError("fit_rate: fewer than 3 usable points");

  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    lx[i] = std::log(fit.abscissae[i]);
    ly[i] = std::log(fit.errors[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_rate: abscissae must not all coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace fracheat
