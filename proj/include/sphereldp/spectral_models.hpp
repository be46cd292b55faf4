#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "errors.hpp"
#include "measures.hpp"
#include "sphereopt.hpp"

namespace sphereldp {

// Transforms of a probability measure q evaluated outside its support.
//   g(xi)            = int (xi - x)^-1 q(dx)
//   g2(xi)           = int (xi - x)^-2 q(dx)
//   l_diff(a, b)     = L(b) - L(a),  L(xi) = int log|xi - x| q(dx)
//   m_ratio(th, ps)  = int (th - x)/(ps - x) q(dx)
//   balance(th, ps, c, gamma) = gamma g(ps) - c m_ratio(th, ps)
template <class M>
concept SpectralModel = requires(const M& q, double a, double b) {
  { q.lower() } -> std::convertible_to<double>;
  { q.upper() } -> std::convertible_to<double>;
  { q.mean() } -> std::convertible_to<double>;
  { q.g(a) } -> std::convertible_to<double>;
  { q.g2(a) } -> std::convertible_to<double>;
  { q.l_diff(a, b) } -> std::convertible_to<double>;
  { q.m_ratio(a, b) } -> std::convertible_to<double>;
  { q.balance(a, b, a, b) } -> std::convertible_to<double>;
};

class DiscreteModel {
 public:
  explicit DiscreteModel(const DiscreteMeasure& q) : x_(q.atoms()), w_(q.weights()) {
    if (!q.is_probability()) throw std::invalid_argument("DiscreteModel: q is not a probability measure");
    mean_ = q.mean();
  }

  double lower() const { return x_.front(); }
  double upper() const { return x_.back(); }
  double mean() const { return mean_; }

  double g(double xi) const {
    double s = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) s += w_[i] / (xi - x_[i]);
    return s;
  }
  double g2(double xi) const {
    double s = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      double d = xi - x_[i];
      s += w_[i] / (d * d);
    }
    return s;
  }
  double l_diff(double a, double b) const {
    double s = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double r = (b - a) / (a - x_[i]);
      s += w_[i] * (r > -1 ? std::log1p(r) : std::log(std::abs(b - x_[i])) - std::log(std::abs(a - x_[i])));
    }
    return s;
  }
  double m_ratio(double theta, double psi) const {
    double s = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) s += w_[i] * (theta - x_[i]) / (psi - x_[i]);
    return s;
  }
  double balance(double theta, double psi, double c, double gamma) const {
    double s = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) s += w_[i] * (gamma - c * (theta - x_[i])) / (psi - x_[i]);
    return s;
  }

 private:
  std::vector<double> x_, w_;
  double mean_ = 0;
};

// Exact semicircle law on [-2, 2].
class SemicircleModel {
 public:
  double lower() const { return -2; }
  double upper() const { return 2; }
  double mean() const { return 0; }

  static double alpha(double xi) {
    double a = std::abs(xi);
    return 0.5 * (a + std::sqrt(std::max(0.0, a * a - 4)));
  }
  double g(double xi) const { return (xi >= 0 ? 1.0 : -1.0) / alpha(xi); }
  double g2(double xi) const {
    double a = std::abs(xi);
    if (a <= 2) return std::numeric_limits<double>::infinity();
    double r = std::sqrt(a * a - 4);
    return 2.0 / (r * (a + r));
  }
  static double l(double xi) {
    double al = alpha(xi);
    return std::log(al) + 0.5 / (al * al);
  }
  double l_diff(double a, double b) const { return l(b) - l(a); }
  double m_ratio(double theta, double psi) const {
    double al = alpha(psi);
    return (psi >= 0 ? theta : -theta) / al - 1.0 / (al * al);
  }
  double balance(double theta, double psi, double c, double gamma) const {
    return gamma * g(psi) - c * m_ratio(theta, psi);
  }
};

namespace detail {

// Moves a bracket end off a singular point toward `other` until f is finite.
template <class F>
double finite_end(F&& f, double at, double other) {
  double v = f(at);
  if (std::isfinite(v)) return at;
  double step = other - at;
  for (int i = 0; i < 1100; ++i) {
    step *= 0.5;
    if (std::isfinite(f(at + step)) && at + step != at) {
      // walk back toward the singular point while still finite
      double cand = at + step;
      for (int j = 0; j < 60; ++j) {
        double nxt = at + (cand - at) * 0.5;
        if (nxt == at || !std::isfinite(f(nxt))) break;
        cand = nxt;
      }
      return cand;
    }
  }
  throw numeric_failure("finite_end: no finite point near singularity");
}

template <class F>
double solve_bracketed(F&& f, double a, double b) {
  double fa = f(a), fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if ((fa > 0) == (fb > 0)) throw numeric_failure("solve_bracketed: no sign change");
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 300;
  auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  return 0.5 * (lo + hi);
}

}  // namespace detail

// F(xi, q; gamma) for a model, with xi at or above the support.
template <SpectralModel M>
BigFResult f_functional(const M& q, double xi, double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("f_functional: gamma must be > 0");
  const double g2x = q.g2(xi);
  if (std::isfinite(g2x) && gamma * g2x <= 1) return {0.5 * (xi + gamma * q.g(xi)), xi, true};
  const double hi = std::max(xi, q.upper()) + std::sqrt(gamma);
  auto h = [&](double th) { return gamma * q.g2(th) - 1.0; };
  const double lo = detail::finite_end(h, xi, hi);
  const double th = detail::solve_bracketed(h, lo, hi);
  return {0.5 * (th + gamma * q.g(th)), th, false};
}

// Lower end of the Haar window: F(lambda_plus, delta_{lambda_minus}; gamma).
inline double haar_m_minus(double lambda_plus, double lambda_minus, double gamma) {
  const double th = std::max(lambda_plus, lambda_minus + std::sqrt(gamma));
  return 0.5 * (th + gamma / (th - lambda_minus));
}

inline double haar_m_plus(double lambda_plus, double gamma) { return 0.5 * lambda_plus + std::sqrt(gamma); }

}  // namespace sphereldp
