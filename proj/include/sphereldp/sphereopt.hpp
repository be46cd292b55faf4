#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "errors.hpp"
#include "io.hpp"
#include "measures.hpp"

namespace sphereldp {

inline constexpr double kTopBlockTol = 1e-12;

// Eigenvalues in non-increasing order.
class OrderedSpectrum {
 public:
  explicit OrderedSpectrum(std::vector<double> values) : v_(std::move(values)) {
    if (v_.empty()) throw std::invalid_argument("OrderedSpectrum: empty");
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (!std::isfinite(v_[i])) throw std::invalid_argument("OrderedSpectrum: non-finite value");
      if (i > 0 && v_[i] > v_[i - 1]) throw std::invalid_argument("OrderedSpectrum: not descending");
    }
  }

  static OrderedSpectrum sorted(std::vector<double> values) {
    std::sort(values.begin(), values.end(), std::greater<>());
    return OrderedSpectrum(std::move(values));
  }

  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  const std::vector<double>& values() const { return v_; }
  double top() const { return v_.front(); }
  double bottom() const { return v_.back(); }

  DiscreteMeasure empirical_measure() const {
    return {v_, std::vector<double>(v_.size(), 1.0 / static_cast<double>(v_.size()))};
  }

  OrderedSpectrum shifted(double c) const {
    auto w = v_;
    for (auto& x : w) x += c;
    return OrderedSpectrum(std::move(w));
  }

 private:
  std::vector<double> v_;
};

struct SecularSolution {
  double theta_star = 0;
  double f_star = 0;
  std::optional<std::vector<double>> optimizer;
  bool boundary = false;
};

namespace detail {

inline void require_finite(std::span<const double> v, const char* who) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(who) + ": non-finite input");
}

// Positive root s of sum w2/(s+d)^2 = 1 with all d >= 0.
inline double secular_root(const std::vector<double>& d, const std::vector<double>& w2, double norm,
                           double scale) {
  auto excess = [&](double s) {
    double acc = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      double r = s + d[i];
      acc += w2[i] / (r * r);
    }
    return acc - 1.0;
  };
  double lo = 0, hi = norm;
  for (int k = 0; excess(hi) > 0; ++k) {
    if (k > 60) throw numeric_failure("solve_secular: could not bracket root");
    lo = hi;
    hi *= 2;
  }
  const double width = 1e-14 * std::max(1.0, std::abs(scale));
  for (int it = 0; it < 400 && hi - lo > width; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (excess(mid) > 0 ? lo : hi) = mid;
  }
  // Newton on 1/sqrt(S) - 1, which is nearly linear in s.
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    double S = 0, dS = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      double r = s + d[i];
      S += w2[i] / (r * r);
      dS += w2[i] / (r * r * r);
    }
    double g = 1.0 / std::sqrt(S) - 1.0;
    double gp = dS / (S * std::sqrt(S));
    double next = std::clamp(s - g / gp, lo, hi);
    if (next == s || std::abs(next - s) <= 1e-16 * s) {
      s = next;
      break;
    }
    s = next;
  }
  return s;
}

}  // namespace detail

// Maximum of 1/2 <lambda, x^2> + <h, x> over the unit sphere.
inline SecularSolution solve_secular(const OrderedSpectrum& lambda, std::span<const double> h) {
  const std::size_t n = lambda.size();
  if (h.size() != n) throw std::invalid_argument("solve_secular: length mismatch");
  detail::require_finite(h, "solve_secular");

  const double l1 = lambda.top();
  std::vector<double> d(n), w2(n);
  double gamma = 0, top_block = 0, rest = 0, rest_lin = 0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = l1 - lambda[i];
    w2[i] = h[i] * h[i];
    gamma += w2[i];
    if (lambda[i] > l1 - kTopBlockTol) {
      top_block += w2[i];
    } else {
      rest += w2[i] / (d[i] * d[i]);
      rest_lin += w2[i] / d[i];
    }
  }

  SecularSolution out;
  if (gamma == 0) {
    out.theta_star = l1;
    out.f_star = 0.5 * l1;
    out.boundary = true;
    return out;
  }
  if (top_block == 0 && rest <= 1.0) {
    out.theta_star = l1;
    out.f_star = 0.5 * (l1 + rest_lin);
    out.boundary = true;
    return out;
  }

  const double s = detail::secular_root(d, w2, std::sqrt(gamma), l1);
  double lin = 0;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = h[i] / (s + d[i]);
    lin += w2[i] / (s + d[i]);
  }
  out.theta_star = l1 + s;
  out.f_star = 0.5 * (out.theta_star + lin);
  out.optimizer = std::move(x);
  return out;
}

inline SecularSolution solve_secular(const OrderedSpectrum& lambda, const std::vector<double>& h) {
  return solve_secular(lambda, std::span<const double>(h));
}

struct BigFResult {
  double value = 0;
  double theta = 0;
  bool boundary = false;
};

// F(xi, nu; gamma) = 1/2 inf_{theta > xi} [theta + gamma * int nu(dx)/(theta - x)].
inline BigFResult big_f_detail(double xi, const DiscreteMeasure& nu, double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("big_f: gamma must be > 0");
  if (!std::isfinite(xi)) throw std::invalid_argument("big_f: non-finite xi");
  if (!nu.empty() && nu.highest() > xi + kAtomMatchTol)
    throw std::invalid_argument("big_f: atom above xi");

  const std::size_t k = nu.size();
  std::vector<double> d(k), w(k);
  double mass = 0;
  bool atom_at_xi = false;
  for (std::size_t i = 0; i < k; ++i) {
    d[i] = std::max(0.0, xi - nu.atom(i));
    w[i] = gamma * nu.weight(i);
    mass += w[i];
    if (d[i] <= kAtomMatchTol && w[i] > 0) atom_at_xi = true;
  }
  auto sums = [&](double s) {
    double s1 = 0, s2 = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (w[i] == 0) continue;
      double r = s + d[i];
      s1 += w[i] / r;
      s2 += w[i] / (r * r);
    }
    return std::pair{s1, s2};
  };

  if (mass == 0) return {0.5 * xi, xi, true};
  if (!atom_at_xi) {
    auto [s1, s2] = sums(0.0);
    if (s2 <= 1.0) return {0.5 * (xi + s1), xi, true};
  }

  double hi = 2 * std::sqrt(mass);
  double lo = 0.5 * hi;
  for (int it = 0; sums(lo).second <= 1.0; ++it) {
    if (it > 1100) throw numeric_failure("big_f: could not bracket root");
    lo *= 0.5;
  }
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(
      [&](double s) { return sums(s).second - 1.0; }, lo, hi, tol, iters);
  double s = 0.5 * (a + b);
  return {0.5 * (xi + s + sums(s).first), xi + s, false};
}

inline double big_f(double xi, const DiscreteMeasure& nu, double gamma) {
  return big_f_detail(xi, nu, gamma).value;
}

inline double mbar(const DiscreteMeasure& q, double lambda_plus, double gamma) {
  if (!q.is_probability()) throw std::invalid_argument("mbar: q is not a probability measure");
  return big_f(lambda_plus, q, gamma);
}

struct Instance {
  OrderedSpectrum lambda{std::vector<double>{0.0}};
  std::vector<double> h;
  double gamma = 0;
};

// "n gamma" then n lines "lambda_i h_i". Unordered spectra are sorted with a warning.
inline Instance read_instance(std::istream& is, const std::string& source, std::ostream* warn) {
  std::string line;
  std::size_t ln = 0;
  long long n = -1;
  double gamma = 0;
  std::vector<std::pair<double, double>> rows;
  while (std::getline(is, line)) {
    ++ln;
    auto tok = io::tokens(line);
    if (tok.empty()) continue;
    if (n < 0) {
      if (tok.size() != 2) throw parse_error(source, ln, "expected 'n gamma'");
      n = io::parse_int(tok[0], source, ln);
      gamma = io::parse_double(tok[1], source, ln);
      if (n < 1) throw parse_error(source, ln, "n must be >= 1");
      if (!(gamma >= 0)) throw parse_error(source, ln, "gamma must be >= 0");
      continue;
    }
    if (tok.size() != 2) throw parse_error(source, ln, "expected 'lambda h'");
    if (static_cast<long long>(rows.size()) == n) throw parse_error(source, ln, "more than n rows");
    double l = io::parse_double(tok[0], source, ln), hv = io::parse_double(tok[1], source, ln);
    if (!std::isfinite(l) || !std::isfinite(hv)) throw parse_error(source, ln, "non-finite entry");
    rows.emplace_back(l, hv);
  }
  if (n < 0) throw parse_error(source, ln, "empty instance");
  if (static_cast<long long>(rows.size()) != n)
    throw parse_error(source, ln, "expected " + std::to_string(n) + " rows, got " + std::to_string(rows.size()));

  bool ordered = std::is_sorted(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.first > b.first; });
  if (!ordered) {
    if (warn) *warn << "warning: " << source << ": spectrum not descending, sorting\n";
    std::stable_sort(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.first > b.first; });
  }
  std::vector<double> l, h;
  double norm2 = 0;
  for (auto& [a, b] : rows) {
    l.push_back(a);
    h.push_back(b);
    norm2 += b * b;
  }
  if (warn && std::abs(norm2 - gamma) > 1e-9 * std::max(1.0, gamma))
    *warn << "warning: " << source << ": declared gamma " << io::fmt(gamma) << " differs from |h|^2 = "
          << io::fmt(norm2) << "\n";
  return {OrderedSpectrum(std::move(l)), std::move(h), gamma};
}

}  // namespace sphereldp
