#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "errors.hpp"
#include "extended.hpp"
#include "measures.hpp"
#include "semicircle.hpp"
#include "spectral_models.hpp"
#include "sphereopt.hpp"

namespace sphereldp {

enum class Flavor { gauss, haar };
enum class PinnedEdge { none, plus, minus };

inline const char* to_string(Flavor f) { return f == Flavor::gauss ? "gauss" : "haar"; }

struct LagrangeState {
  double b = 1;
  double theta = 0;
  double psi = 0;
  double t = 0;
  PinnedEdge pinned_edge = PinnedEdge::none;
  double residual = 0;
};

struct VariationalResult {
  Extended value;
  LagrangeState state;
};

struct LagrangeResiduals {
  double const5 = 0;
  double const2 = 0;
  double const1 = 0;
  double max() const { return std::max({std::abs(const5), std::abs(const2), std::abs(const1)}); }
};

// Residuals of the stationarity system for a returned state.
template <SpectralModel M>
LagrangeResiduals lagrange_residuals(const M& q, const LagrangeState& s, double lambda_plus, double psi_star,
                                     double gamma, double m, Flavor flavor) {
  LagrangeResiduals r;
  const double gpsi = std::abs(s.psi) > 1e300 ? 0.0 : q.g(s.psi);
  const double atom = s.t > 0 ? s.b * gamma * s.t / (s.theta - psi_star) : 0.0;
  if (flavor == Flavor::haar) r.const5 = (s.b - 1) - (s.theta - s.psi) * gpsi - s.b * s.t;
  r.const2 = s.b * (2 * m - s.theta) - gamma * gpsi - atom;
  const double lhs = s.b * (s.psi - s.theta);
  const double rhs = gamma * q.g(s.theta) - gamma * gpsi - atom;
  if (s.theta > lambda_plus)
    r.const1 = lhs - rhs;
  else
    r.const1 = std::min(0.0, lhs - rhs);
  return r;
}

// phi*(x) = (theta - x)/(B (psi - x)).
inline double tilt_profile(const LagrangeState& s, double x) { return (s.theta - x) / (s.b * (s.psi - x)); }

// D(theta) = gamma int phi*/(theta - x)^2 dq + gamma t/(theta - psi*)^2.
template <SpectralModel M>
double const0_d(const M& q, const LagrangeState& s, double psi_star, double gamma) {
  double core;
  if (std::abs(s.theta - s.psi) <= 1e-12 * std::max(1.0, std::abs(s.theta)))
    core = q.g2(s.theta);
  else
    core = (q.g(s.psi) - q.g(s.theta)) / (s.theta - s.psi);
  double d = gamma / s.b * core;
  if (s.t > 0) d += gamma * s.t / ((s.theta - psi_star) * (s.theta - psi_star));
  return d;
}

namespace detail {

inline constexpr double kFarPsi = 1e12;

template <SpectralModel M>
class ProfileSolver {
 public:
  ProfileSolver(const M& q, double edge_plus, double edge_minus, double gamma, double m, Flavor flavor)
      : q_(q), lp_(edge_plus), lm_(edge_minus), gamma_(gamma), m_(m), flavor_(flavor) {}

  VariationalResult solve() {
    const BigFResult bar = f_functional(q_, lp_, gamma_);
    const double mbar = bar.value;
    if (std::abs(m_ - mbar) <= 1e-13 * std::max(1.0, std::abs(mbar))) {
      LagrangeState s;
      s.theta = s.psi = bar.theta;
      return {0.0, s};
    }
    raise_ = m_ > mbar;
    psi_star_ = (flavor_ == Flavor::gauss || raise_) ? lp_ : lm_;

    if (flavor_ == Flavor::gauss && m_ <= 0.5 * lp_) return {Extended::infinity(), {}};
    if (flavor_ == Flavor::haar &&
        (m_ >= haar_m_plus(lp_, gamma_) || m_ <= haar_m_minus(lp_, lm_, gamma_)))
      return {Extended::infinity(), {}};

    double lo, hi;
    if (raise_) {
      auto f = [&](double th) { return th + gamma_ * q_.g(th) - 2 * m_; };
      hi = solve_bracketed(f, bar.theta, 2 * m_);
      double flp = f(lp_);
      if (std::isfinite(flp) && flp <= 0) {
        lo = lp_;
      } else {
        lo = solve_bracketed(f, finite_end(f, lp_, bar.theta), bar.theta);
      }
    } else {
      lo = lp_;
      hi = 2 * m_;
      if (flavor_ == Flavor::haar) {
        const double disc = (2 * m_ - psi_star_) * (2 * m_ - psi_star_) - 4 * gamma_;
        if (disc < 0) return {Extended::infinity(), {}};
        lo = std::max(lo, 0.5 * (2 * m_ + psi_star_ - std::sqrt(disc)));
        hi = std::min(hi, 0.5 * (2 * m_ + psi_star_ + std::sqrt(disc)));
      }
      if (!(lo < hi)) return {Extended::infinity(), {}};
    }

    std::vector<double> grid;
    const int K = 64;
    for (int k = 1; k < K; ++k) grid.push_back(lo + (hi - lo) * 0.5 * (1 - std::cos(M_PI * k / K)));
    for (int j = 3; j <= 13; ++j) {
      grid.push_back(lo + (hi - lo) * std::pow(10.0, -j));
      grid.push_back(hi - (hi - lo) * std::pow(10.0, -j));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    grid.erase(std::remove_if(grid.begin(), grid.end(), [&](double x) { return !(x > lo && x < hi); }),
               grid.end());

    struct Point {
      double theta;
      Inner in;
      double slope;
    };
    std::vector<Point> pts;
    for (double th : grid) {
      Inner in = inner(th);
      pts.push_back({th, in, in.value.finite() ? slope(th, in) : std::numeric_limits<double>::quiet_NaN()});
    }

    std::vector<std::pair<double, Inner>> cands;
    if (!raise_ && lo == lp_) {
      Inner in = inner(lp_);
      if (in.value.finite()) cands.emplace_back(lp_, in);
    }
    auto slope_at = [&](double th) {
      Inner in = inner(th);
      return in.value.finite() ? slope(th, in) : std::numeric_limits<double>::quiet_NaN();
    };
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const double sa = pts[k].slope, sb = pts[k + 1].slope;
      if (!std::isfinite(sa) || !std::isfinite(sb)) continue;
      const bool change = raise_ ? (sa > 0 && sb <= 0) : (sa < 0 && sb >= 0);
      if (!change) continue;
      try {
        double th = solve_bracketed(slope_at, pts[k].theta, pts[k + 1].theta);
        cands.emplace_back(th, inner(th));
      } catch (const numeric_failure&) {
      }
    }
    if (cands.empty()) {
      for (auto& p : pts)
        if (p.in.value.finite()) cands.emplace_back(p.theta, p.in);
    }
    if (cands.empty()) return {Extended::infinity(), {}};

    std::size_t best = 0;
    for (std::size_t k = 1; k < cands.size(); ++k) {
      const Extended v = cands[k].second.value, bv = cands[best].second.value;
      if (raise_ ? (v > bv) : (v < bv)) best = k;
    }
    const auto& [th, in] = cands[best];
    LagrangeState s;
    s.b = in.b;
    s.theta = th;
    s.psi = in.psi;
    s.t = in.t;
    if (in.pinned) s.pinned_edge = (psi_star_ == lp_ && (raise_ || flavor_ == Flavor::gauss)) ? PinnedEdge::plus : PinnedEdge::minus;
    s.residual = lagrange_residuals(q_, s, lp_, psi_star_, gamma_, m_, flavor_).max();
    return {in.value, s};
  }

  double psi_star() const { return psi_star_; }

 private:
  struct Inner {
    Extended value = Extended::infinity();
    double psi = 0, b = 1, t = 0;
    bool pinned = false;
  };

  double slope(double th, const Inner& in) const {
    return 0.5 * (-q_.g(th) + in.b * (2 * m_ - 2 * th + in.psi) / gamma_);
  }

  Inner inner(double th) const {
    const double c = 2 * m_ - th;
    Inner out;
    if (!(c > 0) || !std::isfinite(q_.g(th))) return out;
    return flavor_ == Flavor::gauss ? inner_gauss(th, c) : inner_haar(th, c);
  }

  Inner inner_gauss(double th, double c) const {
    Inner out;
    const double target = c / gamma_;
    const double ps = psi_star_;
    const double gs = q_.g(ps);
    if (std::isfinite(gs) && gs <= target) {
      out.psi = ps;
      out.t = std::max(0.0, (th - ps) * (c - gamma_ * gs) / gamma_);
      out.pinned = out.t > 0;
      out.value = 0.5 * ((th - ps) * gs + out.t + q_.l_diff(th, ps));
      return out;
    }
    auto f = [&](double p) { return q_.g(p) - target; };
    const double hi = ps + 2.0 / target;
    const double psi = solve_bracketed(f, finite_end(f, ps, hi), hi);
    out.psi = psi;
    out.value = 0.5 * ((th - psi) * q_.g(psi) + q_.l_diff(th, psi));
    return out;
  }

  Inner haar_from_psi(double th, double psi) const {
    Inner out;
    out.psi = psi;
    out.b = q_.m_ratio(th, psi);
    out.value = 0.5 * (std::log(std::abs(out.b)) + q_.l_diff(th, psi));
    return out;
  }

  Inner haar_pinned(double th, double c, bool positive_b) const {
    Inner out;
    const double ps = psi_star_;
    const double y = (th - ps) * c / gamma_;
    if (positive_b ? !(y < 1) : !(y > 1)) return out;
    out.psi = ps;
    out.b = 1.0 / (1.0 - y);
    out.t = std::max(0.0, 1.0 - q_.m_ratio(th, ps) / out.b);
    out.pinned = out.t > 0;
    const double v = 0.5 * (std::log(std::abs(out.b)) + q_.l_diff(th, ps));
    if (!std::isfinite(v)) return {};
    out.value = v;
    return out;
  }

  Inner inner_haar(double th, double c) const {
    auto bal = [&](double p) { return q_.balance(th, p, c, gamma_); };
    const double ps = psi_star_;
    const double scale = std::max(1.0, std::abs(th));
    if (raise_) {
      if (th - ps <= 1e-14 * scale) {
        Inner out;
        out.psi = th;
        out.value = 0.0;
        return out;
      }
      const double bs = bal(ps);
      if (bs >= 0 || std::isnan(bs)) {
        const double psi = solve_bracketed(bal, finite_end(bal, ps, th), th);
        return haar_from_psi(th, psi);
      }
      return haar_pinned(th, c, true);
    }
    const double thr = gamma_ / (th - q_.mean());
    if (c > thr) {
      double u = std::max(1.0, th - q_.mean());
      while (bal(th + u) > 0) {
        u *= 2;
        if (u > kFarPsi * scale) return haar_from_psi(th, th + u);
      }
      return haar_from_psi(th, solve_bracketed(bal, th, th + u));
    }
    if (c < thr) {
      double bs = bal(ps);
      if (std::isinf(bs)) bs = -bs;  // atom at psi*: limit from below
      if (bs > 0 || std::isnan(bs)) {
        double u = std::max(1.0, th - q_.mean());
        while (bal(ps - u) >= 0) {
          u *= 2;
          if (u > kFarPsi * scale) return haar_from_psi(th, ps - u);
        }
        const double psi = solve_bracketed(bal, ps - u, finite_end(bal, ps, ps - u));
        return haar_from_psi(th, psi);
      }
      return haar_pinned(th, c, false);
    }
    return haar_from_psi(th, th + kFarPsi * scale);
  }

  const M& q_;
  double lp_, lm_, gamma_, m_;
  Flavor flavor_;
  bool raise_ = false;
  double psi_star_ = 0;
};

inline void require_support(const DiscreteMeasure& q, double lambda_minus, double lambda_plus, const char* who) {
  if (!q.is_probability()) throw std::invalid_argument(std::string(who) + ": q is not a probability measure");
  if (q.empty() || q.lowest() < lambda_minus - kAtomMatchTol || q.highest() > lambda_plus + kAtomMatchTol)
    throw std::invalid_argument(std::string(who) + ": q not supported in [lambda_minus, lambda_plus]");
}

}  // namespace detail

// Quenched rate for any spectral model; edges are where F is evaluated (plus) and
// where a lowering atom may sit (minus).
template <SpectralModel M>
VariationalResult quenched_rate(const M& q, double edge_plus, double edge_minus, double gamma, double m,
                                Flavor flavor) {
  if (!(gamma > 0)) throw std::invalid_argument("quenched_rate: gamma must be > 0");
  if (edge_plus < q.upper() - kAtomMatchTol || edge_minus > q.lower() + kAtomMatchTol)
    throw std::invalid_argument("quenched_rate: edges must enclose the support");
  return detail::ProfileSolver<M>(q, edge_plus, edge_minus, gamma, m, flavor).solve();
}

inline VariationalResult quenched_gauss_general(const DiscreteMeasure& q, double lambda_minus, double lambda_plus,
                                                double gamma, double m) {
  detail::require_support(q, lambda_minus, lambda_plus, "quenched_gauss_general");
  return quenched_rate(DiscreteModel(q), lambda_plus, lambda_minus, gamma, m, Flavor::gauss);
}

inline VariationalResult quenched_haar_general(const DiscreteMeasure& q, double lambda_minus, double lambda_plus,
                                               double gamma, double m) {
  detail::require_support(q, lambda_minus, lambda_plus, "quenched_haar_general");
  if (std::abs(q.lowest() - lambda_minus) > kAtomMatchTol || std::abs(q.highest() - lambda_plus) > kAtomMatchTol)
    throw std::invalid_argument("quenched_haar_general: edges must equal the support endpoints");
  return quenched_rate(DiscreteModel(q), lambda_plus, lambda_minus, gamma, m, Flavor::haar);
}

inline Extended quenched_haar_shifted_edge(const DiscreteMeasure& q, double psi_star_plus, double psi_star_minus,
                                           double gamma, double m) {
  if (q.empty()) throw std::invalid_argument("quenched_haar_shifted_edge: empty q");
  if (psi_star_plus < q.highest() - kAtomMatchTol)
    throw std::invalid_argument("quenched_haar_shifted_edge: psi_star_plus below the support");
  if (psi_star_minus > q.lowest() + kAtomMatchTol)
    throw std::invalid_argument("quenched_haar_shifted_edge: psi_star_minus above the support");
  return quenched_rate(DiscreteModel(q), psi_star_plus, psi_star_minus, gamma, m, Flavor::haar).value;
}

namespace detail {

// Oracle measure for a fixed value multiplier A.
struct OracleMeasure {
  std::vector<double> phi;
  double t = 0;
  double theta = 0;
  bool ok = false;
};

class DirectOracle {
 public:
  DirectOracle(const DiscreteMeasure& q, double lambda_plus, double psi_star, double gamma, Flavor flavor)
      : q_(q), lp_(lambda_plus), ps_(psi_star), gamma_(gamma), flavor_(flavor) {}

  // phi_i = (theta - x_i)/(B (theta - x_i) - A gamma), with B fixed by the mass constraint for haar.
  std::vector<double> phi(double theta, double a, double b) const {
    std::vector<double> p(q_.size());
    for (std::size_t i = 0; i < q_.size(); ++i) {
      const double d = theta - q_.atom(i);
      p[i] = d / (b * d - a * gamma_);
    }
    return p;
  }

  double mass(const std::vector<double>& p) const {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += q_.weight(i) * p[i];
    return s;
  }

  // Haar phi with B = A gamma/(theta - psi*) + off, written so the denominators stay exact near psi*.
  std::vector<double> haar_phi(double theta, double a, double off) const {
    std::vector<double> p(q_.size());
    const double scale = a * gamma_ / (theta - ps_);
    for (std::size_t i = 0; i < q_.size(); ++i) {
      const double d = theta - q_.atom(i);
      p[i] = d / (off * d + scale * (ps_ - q_.atom(i)));
    }
    return p;
  }

  // Returns (off, t): S(off) = int phi dq is decreasing with S(1) <= 1.
  std::pair<double, double> haar_offset(double theta, double a) const {
    auto excess = [&](double off) {
      const double s = mass(haar_phi(theta, a, off)) - 1.0;
      return std::isnan(s) ? std::numeric_limits<double>::infinity() : s;
    };
    const double e0 = excess(0.0);
    if (std::isfinite(e0) && e0 <= 0) return {0.0, -e0};
    double lo = 1.0;
    for (int it = 0; excess(lo) <= 0; ++it) {
      if (it > 1100) throw numeric_failure("oracle: mass bracket failed");
      lo *= 0.5;
    }
    return {solve_bracketed(excess, lo, 1.0), 0.0};
  }

  double d_value(double theta, const std::vector<double>& p, double t) const {
    double s = 0;
    for (std::size_t i = 0; i < q_.size(); ++i) {
      const double d = theta - q_.atom(i);
      s += q_.weight(i) * p[i] / (d * d);
    }
    s *= gamma_;
    if (t > 0) s += gamma_ * t / ((theta - ps_) * (theta - ps_));
    return s;
  }

  struct AtTheta {
    std::vector<double> phi;
    double t = 0, b = 1;
  };

  AtTheta at_theta(double theta, double a) const {
    AtTheta r;
    if (flavor_ == Flavor::haar) {
      auto [off, t] = haar_offset(theta, a);
      r.b = a * gamma_ / (theta - ps_) + off;
      r.t = t;
      r.phi = haar_phi(theta, a, off);
      return r;
    }
    r.phi = phi(theta, a, r.b);
    return r;
  }

  OracleMeasure measure(double a) const {
    OracleMeasure out;
    if (a > 0) {
      if (flavor_ == Flavor::gauss) {
        // theta = psi* + A gamma + e, phi_i = (e + gap_i + A gamma)/(e + gap_i)
        const double ag = a * gamma_;
        auto phi_e = [&](double e) {
          std::vector<double> p(q_.size());
          for (std::size_t i = 0; i < q_.size(); ++i) {
            const double den = e + (ps_ - q_.atom(i));
            p[i] = (den + ag) / den;
          }
          return p;
        };
        auto dfun = [&](double e) {
          double s = 0;
          for (std::size_t i = 0; i < q_.size(); ++i) {
            const double den = e + (ps_ - q_.atom(i));
            s += q_.weight(i) / (den * (den + ag));
          }
          return gamma_ * s - 1.0;
        };
        const double d0 = dfun(0.0);
        double e = 0;
        if (std::isfinite(d0) && d0 <= 0) {
          out.t = -d0 * ag * ag / gamma_;
        } else {
          const double hi = std::max(1.0, q_.highest() - ps_ + std::sqrt(gamma_) + 1.0);
          double lo = hi;
          for (int it = 0; dfun(lo) <= 0; ++it) {
            if (it > 1100) throw numeric_failure("oracle: theta bracket failed");
            lo *= 0.5;
          }
          e = solve_bracketed(dfun, lo, hi);
        }
        out.theta = ps_ + ag + e;
        out.phi = phi_e(e);
      } else {
        auto dfun = [&](double th) {
          if (!(th > ps_)) return std::numeric_limits<double>::infinity();
          auto r = at_theta(th, a);
          return d_value(th, r.phi, r.t) - 1.0;
        };
        double lo = std::max(lp_, ps_), step = std::max(1.0, std::sqrt(gamma_));
        double hi = lo + step;
        while (dfun(hi) > 0) {
          step *= 2;
          hi = lo + step;
          if (step > 1e12) throw numeric_failure("oracle: theta bracket failed");
        }
        const double dlo = std::isfinite(dfun(lo)) ? dfun(lo) : 1.0;
        if (dlo <= 0) {
          out.theta = lo;
        } else {
          out.theta = solve_bracketed(dfun, finite_end(dfun, lo, hi), hi);
        }
        auto r = at_theta(out.theta, a);
        out.phi = r.phi;
        out.t = r.t;
      }
      out.ok = true;
      return out;
    }

    // a < 0: minimize k(theta) = J + |a|/2 (theta + gamma int nu/(theta - x)) over theta >= lambda_plus.
    const double aa = -a;
    auto kval = [&](double th) {
      auto r = at_theta(th, a);
      double s = 0;
      for (std::size_t i = 0; i < q_.size(); ++i) {
        const double d = th - q_.atom(i);
        const double p = r.phi[i];
        if (!(p > 0)) return std::numeric_limits<double>::infinity();
        s += q_.weight(i) * (0.5 * (p - 1 - std::log(p)) + 0.5 * aa * gamma_ * p / d);
      }
      s += 0.5 * r.t + 0.5 * aa * th;
      if (r.t > 0) s += 0.5 * aa * gamma_ * r.t / (th - ps_);
      return s;
    };
    auto dslope = [&](double th) {
      auto r = at_theta(th, a);
      return 1.0 - d_value(th, r.phi, r.t);
    };
    const double thmax = std::max(lp_, q_.highest() + std::sqrt(gamma_)) + 1.0;
    std::vector<double> grid;
    const int K = 400;
    for (int k = 0; k <= K; ++k) grid.push_back(lp_ + (thmax - lp_) * std::pow(static_cast<double>(k) / K, 2));
    std::vector<double> cand;
    double best = std::numeric_limits<double>::infinity(), best_th = thmax;
    auto consider = [&](double th) {
      double v = kval(th);
      if (v < best) {
        best = v;
        best_th = th;
      }
    };
    consider(lp_);
    double prev_th = grid[1], prev = dslope(grid[1]);
    consider(prev_th);
    for (std::size_t k = 2; k < grid.size(); ++k) {
      const double th = grid[k], sl = dslope(th);
      consider(th);
      if (std::isfinite(prev) && std::isfinite(sl) && prev < 0 && sl >= 0) {
        try {
          consider(solve_bracketed(dslope, prev_th, th));
        } catch (const numeric_failure&) {
        }
      }
      prev_th = th;
      prev = sl;
    }
    // boundary layer next to lambda_plus
    for (int j = 3; j <= 14; ++j) consider(lp_ + (grid[1] - lp_) * std::pow(10.0, -j + 2));
    auto r = at_theta(best_th, a);
    out.theta = best_th;
    out.phi = r.phi;
    out.t = r.t;
    out.ok = std::isfinite(best);
    return out;
  }

  DiscreteMeasure nu(const OracleMeasure& om) const {
    std::vector<double> x = q_.atoms(), w(q_.size());
    for (std::size_t i = 0; i < q_.size(); ++i) w[i] = om.phi[i] * q_.weight(i);
    if (om.t > 0) {
      x.push_back(ps_);
      w.push_back(om.t);
    }
    return {std::move(x), std::move(w)};
  }

  Extended cost(const OracleMeasure& om) const {
    double s = 0.5 * om.t;
    for (std::size_t i = 0; i < q_.size(); ++i) {
      auto j = j1(om.phi[i]);
      if (!j.finite()) return Extended::infinity();
      s += q_.weight(i) * j.value();
    }
    return s;
  }

  double f_of(double a) const {
    auto om = measure(a);
    if (!om.ok) return std::numeric_limits<double>::quiet_NaN();
    return big_f(lp_, nu(om), gamma_);
  }

 private:
  const DiscreteMeasure& q_;
  double lp_, ps_, gamma_;
  Flavor flavor_;
};

}  // namespace detail

// Brute-force minimization over the full phi vector via bisection on the value multiplier.
inline Extended direct_minimize_oracle(const DiscreteMeasure& q, double lambda_plus, double psi_star, double gamma,
                                       double m, Flavor flavor) {
  if (q.size() > 5000) throw std::invalid_argument("direct_minimize_oracle: more than 5000 atoms");
  if (!q.is_probability()) throw std::invalid_argument("direct_minimize_oracle: q is not a probability measure");
  if (!(gamma > 0)) throw std::invalid_argument("direct_minimize_oracle: gamma must be > 0");
  if (q.highest() > lambda_plus + kAtomMatchTol)
    throw std::invalid_argument("direct_minimize_oracle: support above lambda_plus");

  detail::DirectOracle oracle(q, lambda_plus, psi_star, gamma, flavor);
  const double mbar = big_f(lambda_plus, q, gamma);
  if (std::abs(m - mbar) <= 1e-13 * std::max(1.0, std::abs(mbar))) return 0.0;
  const double sign = m > mbar ? 1.0 : -1.0;

  double lo = 0, hi = 1e3;
  for (;;) {
    const double fv = oracle.f_of(sign * hi);
    if (std::isfinite(fv) && sign * (fv - m) >= 0) break;
    lo = hi;
    hi *= 10;
    if (hi > 1e12) return Extended::infinity();
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fv = oracle.f_of(sign * mid);
    if (std::isfinite(fv) && sign * (fv - m) < 0)
      lo = mid;
    else
      hi = mid;
  }
  const double a = sign * 0.5 * (lo + hi);
  return oracle.cost(oracle.measure(a));
}

struct AnnealedResult {
  Extended value;
  double psi_star = 2;
};

// inf over the shifted edge psi of the quenched rate plus I_e(psi), with the other
// edge pinned at the semicircle edge.
template <SpectralModel M>
AnnealedResult annealed_rate(const M& q, double m, double gamma, Flavor flavor) {
  if (!(gamma > 0)) throw std::invalid_argument("annealed_rate: gamma must be > 0");
  const double mbar0 = f_functional(q, 2.0, gamma).value;
  const bool shift_plus = flavor == Flavor::gauss || m >= mbar0;
  auto objective = [&](double psi) -> Extended {
    VariationalResult r = shift_plus ? quenched_rate(q, psi, -2.0, gamma, m, flavor)
                                     : quenched_rate(q, 2.0, -psi, gamma, m, flavor);
    return r.value + ie(psi);
  };
  auto as_double = [](Extended e) { return e.finite() ? e.value() : 1e300; };

  const double a = 2.0, b = 2.0 + 2 * m + std::sqrt(gamma);
  const int K = 64;
  std::vector<double> xs(K + 1), fs(K + 1);
  for (int k = 0; k <= K; ++k) {
    xs[k] = a + (b - a) * k / K;
    fs[k] = as_double(objective(xs[k]));
  }
  const int kb = static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  AnnealedResult best{fs[kb] < 1e300 ? Extended(fs[kb]) : Extended::infinity(), xs[kb]};
  const double lo = xs[std::max(0, kb - 1)], hi = xs[std::min(K, kb + 1)];
  std::uintmax_t iters = 200;
  auto [x, fx] = boost::math::tools::brent_find_minima([&](double p) { return as_double(objective(p)); }, lo, hi,
                                                       std::numeric_limits<double>::digits / 2, iters);
  if (fx < as_double(best.value)) best = {Extended(fx), x};
  return best;
}

inline Extended annealed_general_gauss(double m, double gamma, std::size_t atoms = 2000) {
  const DiscreteMeasure sigma = semicircle_discretization(atoms);
  return annealed_rate(DiscreteModel(sigma), m, gamma, Flavor::gauss).value;
}

inline Extended annealed_general_haar(double m, double gamma, std::size_t atoms = 2000) {
  const DiscreteMeasure sigma = semicircle_discretization(atoms);
  return annealed_rate(DiscreteModel(sigma), m, gamma, Flavor::haar).value;
}

}  // namespace sphereldp
