#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "extended.hpp"
#include "io.hpp"

namespace sphereldp {

inline constexpr double kAtomMatchTol = 1e-12;
inline constexpr double kProbabilityTol = 1e-12;

// Finite nonnegative measure on the line: ascending atoms with weights.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights) {
    if (atoms.size() != weights.size())
      throw std::invalid_argument("DiscreteMeasure: atoms/weights length mismatch");
    std::vector<std::size_t> idx(atoms.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!std::isfinite(atoms[i]) || !std::isfinite(weights[i]))
        throw std::invalid_argument("DiscreteMeasure: non-finite entry");
      if (weights[i] < 0) throw std::invalid_argument("DiscreteMeasure: negative weight");
    }
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return atoms[a] < atoms[b]; });
    for (auto i : idx) {
      if (!atoms_.empty() && atoms_.back() == atoms[i]) {
        weights_.back() += weights[i];
      } else {
        atoms_.push_back(atoms[i]);
        weights_.push_back(weights[i]);
      }
    }
  }

  static DiscreteMeasure dirac(double x, double mass = 1.0) { return {{x}, {mass}}; }

  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  double atom(std::size_t i) const { return atoms_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  double total_mass() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }
  bool is_probability() const { return std::abs(total_mass() - 1.0) <= kProbabilityTol; }

  double lowest() const {
    if (empty()) throw std::logic_error("DiscreteMeasure: empty");
    return atoms_.front();
  }
  double highest() const {
    if (empty()) throw std::logic_error("DiscreteMeasure: empty");
    return atoms_.back();
  }

  double mean() const {
    double s = 0, w = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      s += weights_[i] * atoms_[i];
      w += weights_[i];
    }
    return s / w;
  }

  DiscreteMeasure scaled(double c) const {
    if (c < 0) throw std::invalid_argument("DiscreteMeasure: negative scale");
    DiscreteMeasure out = *this;
    for (auto& w : out.weights_) w *= c;
    return out;
  }

  friend DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    std::vector<double> x = a.atoms_, w = a.weights_;
    x.insert(x.end(), b.atoms_.begin(), b.atoms_.end());
    w.insert(w.end(), b.weights_.begin(), b.weights_.end());
    return {std::move(x), std::move(w)};
  }

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

inline Extended j1(double y) {
  if (!(y >= 0)) throw std::invalid_argument("j1: y must be >= 0");
  if (y == 0) return Extended::infinity();
  return 0.5 * (y - 1.0 - std::log(y));
}

inline Extended j_alpha(double y, double alpha) {
  if (!(alpha >= 0 && alpha <= 1)) throw std::invalid_argument("j_alpha: alpha outside [0,1]");
  if (!(y >= 0)) throw std::invalid_argument("j_alpha: y must be >= 0");
  if (alpha == 0) return 0.5 * y;
  if (y == 0) return Extended::infinity();
  return 0.5 * (y - alpha + alpha * std::log(alpha / y));
}

inline Extended relative_entropy(const DiscreteMeasure& q, const DiscreteMeasure& nu) {
  if (!q.is_probability()) throw std::invalid_argument("relative_entropy: q is not a probability measure");
  double sum = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q.weight(i) == 0) continue;
    double x = q.atom(i);
    while (j < nu.size() && nu.atom(j) < x - kAtomMatchTol) ++j;
    if (j == nu.size() || std::abs(nu.atom(j) - x) > kAtomMatchTol || nu.weight(j) == 0)
      return Extended::infinity();
    sum += q.weight(i) * std::log(q.weight(i) / nu.weight(j));
  }
  return std::max(0.0, sum + nu.total_mass() - 1.0);
}

namespace detail {
inline void require_outside(const DiscreteMeasure& nu, double xi, const char* who) {
  if (nu.empty()) return;
  if (!(xi > nu.highest() || xi < nu.lowest()))
    throw std::invalid_argument(std::string(who) + ": argument inside or touching the atom range");
}
}  // namespace detail

inline double stieltjes_discrete(const DiscreteMeasure& nu, double xi) {
  detail::require_outside(nu, xi, "stieltjes_discrete");
  double s = 0;
  for (std::size_t i = 0; i < nu.size(); ++i) s += nu.weight(i) / (xi - nu.atom(i));
  return s;
}

// Integral of (xi - x)^-2, the derivative of -G.
inline double stieltjes2_discrete(const DiscreteMeasure& nu, double xi) {
  detail::require_outside(nu, xi, "stieltjes2_discrete");
  double s = 0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    double d = xi - nu.atom(i);
    s += nu.weight(i) / (d * d);
  }
  return s;
}

// L(b) - L(a) with L(xi) = integral of log|xi - x|.
inline double logpot_diff_discrete(const DiscreteMeasure& nu, double a, double b) {
  detail::require_outside(nu, a, "logpot_diff_discrete");
  detail::require_outside(nu, b, "logpot_diff_discrete");
  double s = 0;
  for (std::size_t i = 0; i < nu.size(); ++i)
    s += nu.weight(i) * std::log1p((b - a) / (a - nu.atom(i)));
  return s;
}

inline void write_measure_csv(std::ostream& os, const DiscreteMeasure& nu) {
  os << "atom,weight\n";
  for (std::size_t i = 0; i < nu.size(); ++i)
    os << io::fmt(nu.atom(i)) << ',' << io::fmt(nu.weight(i)) << '\n';
}

inline DiscreteMeasure read_measure_csv(std::istream& is, const std::string& source = "<measure>") {
  std::string line;
  std::size_t ln = 0;
  std::vector<double> x, w;
  bool header = false;
  while (std::getline(is, line)) {
    ++ln;
    auto t = io::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header) {
      if (t != "atom,weight") throw parse_error(source, ln, "expected header 'atom,weight'");
      header = true;
      continue;
    }
    auto f = io::split(t, ',');
    if (f.size() != 2) throw parse_error(source, ln, "expected two fields");
    x.push_back(io::parse_double(f[0], source, ln));
    w.push_back(io::parse_double(f[1], source, ln));
  }
  if (!header) throw parse_error(source, ln, "missing header");
  try {
    return {std::move(x), std::move(w)};
  } catch (const std::invalid_argument& e) {
    throw parse_error(source, ln, e.what());
  }
}

}  // namespace sphereldp
