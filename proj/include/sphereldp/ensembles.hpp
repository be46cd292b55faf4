#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "io.hpp"
#include "rng.hpp"
#include "sphereopt.hpp"

namespace sphereldp {

// Symmetric matrix, upper triangle packed row-major.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n) : n_(n), a_(n * (n + 1) / 2, 0.0) {}

  std::size_t order() const { return n_; }
  static std::size_t packed_index(std::size_t n, std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return i * (2 * n - i + 1) / 2 + (j - i);
  }
  double operator()(std::size_t i, std::size_t j) const { return a_[index(i, j)]; }
  void set(std::size_t i, std::size_t j, double v) { a_[index(i, j)] = v; }
  const std::vector<double>& packed() const { return a_; }
  std::vector<double>& packed() { return a_; }

  std::vector<double> dense() const {
    std::vector<double> m(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j) m[i * n_ + j] = m[j * n_ + i] = (*this)(i, j);
    return m;
  }

  double max_abs() const {
    double m = 0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  std::size_t index(std::size_t i, std::size_t j) const { return packed_index(n_, i, j); }
  std::size_t n_ = 0;
  std::vector<double> a_;
};

struct DistributionSpec {
  enum class Kind { gaussian, rademacher, uniform };
  Kind kind = Kind::gaussian;
  double variance = 1.0;

  // "gaussian", "rademacher", "uniform", optionally ":<variance>".
  static DistributionSpec parse(const std::string& text) {
    auto colon = text.find(':');
    std::string name = text.substr(0, colon);
    DistributionSpec d;
    if (name == "gaussian") d.kind = Kind::gaussian;
    else if (name == "rademacher") d.kind = Kind::rademacher;
    else if (name == "uniform") d.kind = Kind::uniform;
    else throw std::invalid_argument("unknown distribution spec '" + text + "'");
    if (colon != std::string::npos) {
      try {
        d.variance = std::stod(text.substr(colon + 1));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad variance in distribution spec '" + text + "'");
      }
      if (!(d.variance >= 0) || !std::isfinite(d.variance))
        throw std::invalid_argument("bad variance in distribution spec '" + text + "'");
    }
    return d;
  }

  std::string str() const {
    const char* names[] = {"gaussian", "rademacher", "uniform"};
    return std::string(names[static_cast<int>(kind)]) + ":" + io::fmt(variance);
  }

  double from_uniform(double u) const {
    switch (kind) {
      case Kind::gaussian: return std::sqrt(variance) * CounterRng::normal_quantile(u);
      case Kind::rademacher: return u < 0.5 ? -std::sqrt(variance) : std::sqrt(variance);
      case Kind::uniform: return std::sqrt(3.0 * variance) * (2.0 * u - 1.0);
    }
    return 0;
  }
};

// Entry (i,j) consumes counter packed_index(i,j) of the given stream.
inline SymmetricMatrix sample_wigner(std::size_t n, const DistributionSpec& diag,
                                     const DistributionSpec& offdiag, RngSeed seed) {
  if (n == 0) throw std::invalid_argument("sample_wigner: n must be >= 1");
  if (std::abs(offdiag.variance - 1.0) > 1e-12)
    throw std::invalid_argument("sample_wigner: off-diagonal variance must be 1");
  CounterRng rng(seed);
  SymmetricMatrix w(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  auto& a = w.packed();
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j, ++k) {
      double u = rng.uniform_at(k);
      a[k] = scale * (i == j ? diag : offdiag).from_uniform(u);
    }
  return w;
}

inline SymmetricMatrix sample_goe(std::size_t n, RngSeed seed) {
  if (n == 0) throw std::invalid_argument("sample_goe: n must be >= 1");
  return sample_wigner(n, {DistributionSpec::Kind::gaussian, 2.0}, {DistributionSpec::Kind::gaussian, 1.0}, seed);
}

inline std::vector<double> sample_gauss_field(std::size_t n, double gamma, RngSeed seed) {
  if (n == 0) throw std::invalid_argument("sample_gauss_field: n must be >= 1");
  if (!(gamma > 0)) throw std::invalid_argument("sample_gauss_field: gamma must be > 0");
  CounterRng rng(seed);
  const double scale = std::sqrt(gamma / static_cast<double>(n));
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = scale * rng.normal_at(i);
  return g;
}

// Same underlying normals as sample_gauss_field, rescaled to radius sqrt(gamma).
inline std::vector<double> sample_haar_sphere(std::size_t n, double gamma, RngSeed seed) {
  if (n == 0) throw std::invalid_argument("sample_haar_sphere: n must be >= 1");
  if (!(gamma > 0)) throw std::invalid_argument("sample_haar_sphere: gamma must be > 0");
  CounterRng rng(seed);
  std::vector<double> g(n);
  double norm2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = rng.normal_at(i);
    norm2 += g[i] * g[i];
  }
  const double scale = std::sqrt(gamma / norm2);
  for (auto& x : g) x *= scale;
  return g;
}

enum class EigenMethod { automatic, jacobi, tridiagonal };

struct EigenOptions {
  EigenMethod method = EigenMethod::automatic;
  double jacobi_tolerance = 1e-12;
  int jacobi_max_sweeps = 100;
  std::size_t automatic_jacobi_limit = 64;
};

struct EigenDecomposition {
  OrderedSpectrum values{std::vector<double>{0.0}};
  std::vector<double> vectors;  // row i is the unit eigenvector of values[i]
  std::size_t n = 0;

  double vec(std::size_t i, std::size_t k) const { return vectors[i * n + k]; }

  std::vector<double> rotate(std::span<const double> h) const {
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += vectors[i * n + k] * h[k];
      out[i] = s;
    }
    return out;
  }
};

namespace detail {

inline EigenDecomposition sorted_decomposition(std::size_t n, const std::vector<double>& evals,
                                               const std::vector<double>& evec_cols) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return evals[a] > evals[b]; });
  std::vector<double> vals(n), rows(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    vals[r] = evals[order[r]];
    for (std::size_t k = 0; k < n; ++k) rows[r * n + k] = evec_cols[k * n + order[r]];
  }
  return {OrderedSpectrum(std::move(vals)), std::move(rows), n};
}

// Cyclic Jacobi; stops when off-diagonal Frobenius mass < tol * ||W||_F.
inline EigenDecomposition jacobi_eigen(const SymmetricMatrix& w, double tol, int max_sweeps) {
  const std::size_t n = w.order();
  std::vector<double> a = w.dense(), v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  double frob = 0;
  for (double x : a) frob += x * x;
  frob = std::sqrt(frob);

  auto off = [&] {
    double s = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += 2 * a[p * n + q] * a[p * n + q];
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off() > tol * frob) {
    if (++sweep > max_sweeps) throw numeric_failure("jacobi_eigen: no convergence");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0) continue;
        const double tau = (a[q * n + q] - a[p * n + p]) / (2 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::sqrt(1 + t * t), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = a[p * n + k] = c * akp - s * akq;
          a[k * n + q] = a[q * n + k] = s * akp + c * akq;
        }
        a[p * n + p] -= t * apq;
        a[q * n + q] += t * apq;
        a[p * n + q] = a[q * n + p] = 0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
  }
  std::vector<double> evals(n);
  for (std::size_t i = 0; i < n; ++i) evals[i] = a[i * n + i];
  return sorted_decomposition(n, evals, v);
}

inline EigenDecomposition tridiagonal_eigen(const SymmetricMatrix& w) {
  const std::size_t n = w.order();
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = w(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw numeric_failure("tridiagonal_eigen: no convergence");
  std::vector<double> evals(n), cols(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    evals[i] = es.eigenvalues()(i);
    for (std::size_t k = 0; k < n; ++k) cols[k * n + i] = es.eigenvectors()(k, i);
  }
  return sorted_decomposition(n, evals, cols);
}

}  // namespace detail

inline EigenDecomposition spectrum(const SymmetricMatrix& w, const EigenOptions& opt = {}) {
  if (w.order() == 0) throw std::invalid_argument("spectrum: empty matrix");
  for (double x : w.packed())
    if (!std::isfinite(x)) throw std::invalid_argument("spectrum: non-finite entry");
  bool use_jacobi = opt.method == EigenMethod::jacobi ||
                    (opt.method == EigenMethod::automatic && w.order() <= opt.automatic_jacobi_limit);
  return use_jacobi ? detail::jacobi_eigen(w, opt.jacobi_tolerance, opt.jacobi_max_sweeps)
                    : detail::tridiagonal_eigen(w);
}

struct FieldSolution {
  double f = 0;
  double lambda1 = 0;
};

inline FieldSolution f_value_detail(const SymmetricMatrix& w, std::span<const double> h,
                                    const EigenOptions& opt = {}) {
  if (h.size() != w.order()) throw std::invalid_argument("f_value: dimension mismatch");
  auto eig = spectrum(w, opt);
  auto ht = eig.rotate(h);
  return {solve_secular(eig.values, ht).f_star, eig.values.top()};
}

inline double f_value(const SymmetricMatrix& w, std::span<const double> h, const EigenOptions& opt = {}) {
  return f_value_detail(w, h, opt).f;
}

inline double f_value(const SymmetricMatrix& w, const std::vector<double>& h, const EigenOptions& opt = {}) {
  return f_value(w, std::span<const double>(h), opt);
}

inline void write_matrix(std::ostream& os, const SymmetricMatrix& w) {
  const std::size_t n = w.order();
  os << n << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) os << (j > i ? " " : "") << io::fmt(w(i, j));
    os << '\n';
  }
}

inline SymmetricMatrix read_matrix(std::istream& is, const std::string& source = "<matrix>") {
  std::string line;
  std::size_t ln = 0;
  long long n = -1;
  SymmetricMatrix w;
  std::size_t k = 0, need = 0;
  while (std::getline(is, line)) {
    ++ln;
    for (auto& tok : io::tokens(line)) {
      if (n < 0) {
        n = io::parse_int(tok, source, ln);
        if (n < 1) throw parse_error(source, ln, "matrix order must be >= 1");
        w = SymmetricMatrix(static_cast<std::size_t>(n));
        need = w.packed().size();
        continue;
      }
      if (k == need) throw parse_error(source, ln, "too many entries");
      double x = io::parse_double(tok, source, ln);
      if (!std::isfinite(x)) throw parse_error(source, ln, "non-finite entry");
      w.packed()[k++] = x;
    }
  }
  if (n < 0) throw parse_error(source, ln, "empty matrix file");
  if (k != need)
    throw parse_error(source, ln, "expected " + std::to_string(need) + " entries, got " + std::to_string(k));
  return w;
}

}  // namespace sphereldp
