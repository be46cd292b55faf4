#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace sphereldp::oracle {

// Max of 1/2 <lambda, x^2> + <h, x> on S^2: Fibonacci grid, then projected gradient ascent
// from the best grid points.
inline double sphere_grid_max(const std::array<double, 3>& lambda, const std::array<double, 3>& h,
                              std::size_t points = 1'000'000, std::size_t starts = 8) {
  auto obj = [&](const std::array<double, 3>& x) {
    double v = 0;
    for (int i = 0; i < 3; ++i) v += 0.5 * lambda[i] * x[i] * x[i] + h[i] * x[i];
    return v;
  };
  const double golden = std::numbers::pi * (3 - std::sqrt(5.0));
  std::vector<std::pair<double, std::array<double, 3>>> best;
  for (std::size_t i = 0; i < points; ++i) {
    const double z = 1 - (2.0 * static_cast<double>(i) + 1) / static_cast<double>(points);
    const double r = std::sqrt(std::max(0.0, 1 - z * z)), ph = golden * static_cast<double>(i);
    std::array<double, 3> x{r * std::cos(ph), r * std::sin(ph), z};
    const double v = obj(x);
    if (best.size() < starts || v > best.back().first) {
      if (best.size() == starts) best.pop_back();
      best.emplace_back(v, x);
      std::sort(best.begin(), best.end(), [](auto& a, auto& b) { return a.first > b.first; });
    }
  }
  double scale = 1e-300;
  for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(lambda[i]) + std::abs(h[i]));
  const double eta = 0.25 / scale;
  double result = -1e300;
  for (auto [v, x] : best) {
    for (int it = 0; it < 200000; ++it) {
      std::array<double, 3> g{};
      double gx = 0;
      for (int i = 0; i < 3; ++i) {
        g[i] = lambda[i] * x[i] + h[i];
        gx += g[i] * x[i];
      }
      double pn = 0;
      std::array<double, 3> y{};
      for (int i = 0; i < 3; ++i) {
        const double pg = g[i] - gx * x[i];
        pn += pg * pg;
        y[i] = x[i] + eta * pg;
      }
      const double nrm = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
      for (auto& c : y) c /= nrm;
      x = y;
      if (std::sqrt(pn) < 1e-13 * scale) break;
    }
    result = std::max(result, obj(x));
  }
  return result;
}

// int_2^psi sqrt((u/2)^2 - 1) du by tanh-sinh quadrature, after u = 2 + s^2.
inline double ie_quadrature(double psi) {
  if (psi < 2) throw std::invalid_argument("ie_quadrature: psi < 2");
  if (psi == 2) return 0;
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate([](double s) { return s * s * std::sqrt(s * s + 4); }, 0.0, std::sqrt(psi - 2), 1e-14);
}

// Adaptive Gauss-Kronrod quadrature of a smooth integrand on [a, b].
template <class F>
double integrate(F&& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace sphereldp::oracle
