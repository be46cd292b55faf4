#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "extended.hpp"
#include "measures.hpp"
#include "rates_variational.hpp"
#include "semicircle.hpp"
#include "spectral_models.hpp"

namespace sphereldp {

struct PhaseConstants {
  double gamma = 0;
  double m_c = 0;
  double m_L = 0;
  double m_bar = 0;
  double m_U = 0;
};

enum class Phase { none, I, II, III, annealed_tail };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::I: return "I";
    case Phase::II: return "II";
    case Phase::III: return "III";
    case Phase::annealed_tail: return "annealed-tail";
    default: return "none";
  }
}

struct RateCurvePoint {
  double m = 0;
  Extended value = Extended::infinity();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double theta = std::numeric_limits<double>::quiet_NaN();
  double psi = std::numeric_limits<double>::quiet_NaN();
  double t = 0;
  Phase phase = Phase::none;
};

namespace detail {
inline void require_gamma(double gamma, const char* who) {
  if (!(gamma > 0)) throw std::invalid_argument(std::string(who) + ": gamma must be > 0");
}
}  // namespace detail

inline PhaseConstants phase_constants(double gamma) {
  detail::require_gamma(gamma, "phase_constants");
  PhaseConstants c;
  c.gamma = gamma;
  c.m_c = std::sqrt((1 + 2 * gamma) / (1 + gamma));
  c.m_L = 1 + gamma / (2 * (1 + gamma));
  c.m_bar = std::sqrt(1 + gamma);
  c.m_U = 1 + gamma * (1 + 2 * gamma) / (2 * (1 + gamma));
  return c;
}

inline double script_i(double alpha, double beta) {
  if (!(alpha > 0) || !(beta > 0)) throw std::invalid_argument("script_i: alpha and beta must be > 0");
  const double r = alpha / beta, d = 1 / alpha - 1 / beta;
  return 0.5 * (r - 1 - std::log(r)) - 0.25 * d * d;
}

inline double frak_t(double alpha, double m, double gamma) {
  detail::require_gamma(gamma, "frak_t");
  const double s = alpha + 1 / alpha;
  return (s - 2) * (2 * m - s - gamma) / gamma;
}

namespace detail {

inline double root_mc(double m, double mc) {
  if (std::abs(m - mc) <= 1e-14) return 0;
  return std::sqrt(m * m - mc * mc);
}

inline void fill_geometry(RateCurvePoint& p) {
  p.theta = p.alpha + 1 / p.alpha;
  p.psi = p.beta + 1 / p.beta;
}

}  // namespace detail

inline RateCurvePoint quenched_gauss_semicircle(double m, double gamma) {
  const PhaseConstants c = phase_constants(gamma);
  RateCurvePoint p;
  p.m = m;
  if (!(m > 1)) return p;
  if (m <= c.m_L) {
    p.phase = Phase::I;
    p.alpha = 1;
    p.beta = gamma / (2 * (m - 1));
    p.value = script_i(p.alpha, p.beta);
  } else if (m < c.m_U) {
    p.phase = Phase::II;
    const double r = detail::root_mc(m, c.m_c);
    p.alpha = (m + r) / (c.m_c * c.m_c);
    p.beta = (1 + gamma) * (m - r);
    p.value = std::max(0.0, script_i(p.alpha, p.beta));
  } else {
    p.phase = Phase::III;
    p.alpha = 0.5 * ((m + 1) + std::sqrt((m + 1) * (m + 1) - 4 - 2 * gamma));
    p.beta = 1;
    p.t = std::max(0.0, frak_t(p.alpha, m, gamma));
    p.value = script_i(p.alpha, p.beta) + 0.5 * p.t;
  }
  detail::fill_geometry(p);
  return p;
}

inline RateCurvePoint annealed_gauss(double m, double gamma) {
  const PhaseConstants c = phase_constants(gamma);
  if (m <= c.m_U) return quenched_gauss_semicircle(m, gamma);
  RateCurvePoint p;
  p.m = m;
  p.phase = Phase::annealed_tail;
  const double r = detail::root_mc(m, c.m_c);
  p.alpha = (m + r) / (c.m_c * c.m_c);
  const double beta_inv = (1 + gamma) * (m - r);
  p.beta = 1 / beta_inv;
  p.value = script_i(p.alpha, beta_inv);
  detail::fill_geometry(p);
  p.t = (p.theta - p.psi) * (p.beta - 1 / p.beta);
  return p;
}

inline Extended fld_rate(double m, double gamma) {
  const PhaseConstants c = phase_constants(gamma);
  if (!(m > c.m_c)) return Extended::infinity();
  const double r = std::sqrt(m * m - c.m_c * c.m_c);
  return m / (1 + 2 * gamma) * (-m * gamma + (1 + gamma) * r) -
         std::log(std::sqrt(1 + gamma) / (1 + 2 * gamma) * (m + r));
}

inline VariationalResult quenched_haar_semicircle(double m, double gamma) {
  detail::require_gamma(gamma, "quenched_haar_semicircle");
  return quenched_rate(SemicircleModel{}, 2.0, -2.0, gamma, m, Flavor::haar);
}

inline Extended annealed_haar(double m, double gamma) {
  detail::require_gamma(gamma, "annealed_haar");
  return annealed_rate(SemicircleModel{}, m, gamma, Flavor::haar).value;
}

}  // namespace sphereldp
