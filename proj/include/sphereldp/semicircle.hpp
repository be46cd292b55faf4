#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "extended.hpp"
#include "measures.hpp"
#include "sphereopt.hpp"

namespace sphereldp {

inline double semicircle_density(double x) {
  if (std::abs(x) >= 2) return 0;
  return std::sqrt(4 - x * x) / (2 * std::numbers::pi);
}

inline double semicircle_cdf(double x) {
  if (x <= -2) return 0;
  if (x >= 2) return 1;
  return 0.5 + x * std::sqrt(4 - x * x) / (4 * std::numbers::pi) + std::asin(x / 2) / std::numbers::pi;
}

inline double semicircle_quantile(double u) {
  if (!(u >= 0 && u <= 1)) throw std::invalid_argument("semicircle_quantile: u outside [0,1]");
  if (u == 0) return -2;
  if (u == 1) return 2;
  if (u == 0.5) return 0;
  boost::math::tools::eps_tolerance<double> tol(53);
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve([u](double x) { return semicircle_cdf(x) - u; }, -2.0, 2.0,
                                                  -u, 1 - u, tol, iters);
  return 0.5 * (a + b);
}

// N equal-mass atoms at the midpoint quantiles (k + 1/2)/N.
inline DiscreteMeasure semicircle_discretization(std::size_t n_atoms) {
  if (n_atoms == 0) throw std::invalid_argument("semicircle_discretization: N must be >= 1");
  std::vector<double> x(n_atoms), w(n_atoms, 1.0 / static_cast<double>(n_atoms));
  for (std::size_t k = 0; k < n_atoms; ++k)
    x[k] = semicircle_quantile((static_cast<double>(k) + 0.5) / static_cast<double>(n_atoms));
  return {std::move(x), std::move(w)};
}

// Quantiles k/(n-1), so the extreme eigenvalues sit exactly at the edges +-2.
inline OrderedSpectrum semicircle_spectrum(std::size_t n) {
  if (n == 0) throw std::invalid_argument("semicircle_spectrum: n must be >= 1");
  if (n == 1) return OrderedSpectrum({0.0});
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k)
    v[k] = semicircle_quantile(static_cast<double>(n - 1 - k) / static_cast<double>(n - 1));
  return OrderedSpectrum(std::move(v));
}

// I_e(psi) = int_2^psi sqrt((u/2)^2 - 1) du = sinh(2s)/2 - s with psi = 2 cosh s.
inline Extended ie(double psi) {
  if (!(psi >= 2)) return Extended::infinity();
  const double s = std::acosh(psi / 2);
  if (s < 1e-2) {
    const double s2 = s * s;
    return s * s2 * (2.0 / 3 + s2 * (2.0 / 15 + s2 * (4.0 / 315 + s2 * (2.0 / 2835))));
  }
  return 0.5 * std::sinh(2 * s) - s;
}

}  // namespace sphereldp
