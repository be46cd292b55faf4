#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ensembles.hpp"
#include "io.hpp"
#include "mc.hpp"
#include "measures.hpp"
#include "oracles.hpp"
#include "rates_closed.hpp"
#include "rates_variational.hpp"
#include "semicircle.hpp"
#include "spectral_models.hpp"
#include "sphereopt.hpp"

namespace sphereldp::checks {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  std::vector<CheckResult> parts;
};

struct Criterion {
  int id;
  std::string name;
  bool slow;
  std::function<CheckResult()> run;
};

namespace detail {

inline std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

inline CheckResult make(std::string name, bool pass, std::string detail) {
  return {std::move(name), pass, std::move(detail), {}};
}

inline CheckResult guarded(const std::string& name, const std::function<CheckResult()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return make(name, false, std::string("exception: ") + e.what());
  }
}

inline DiscreteMeasure random_probability(std::mt19937_64& rng, std::size_t k, double lo, double hi) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(k), w(k);
  double s = 0;
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = lo + (hi - lo) * u(rng);
    w[i] = 0.1 + u(rng);
    s += w[i];
  }
  for (auto& v : w) v /= s;
  return {std::move(x), std::move(w)};
}

inline double to_d(Extended e) { return e.to_double(); }

}  // namespace detail

// ---------------------------------------------------------------- measures

inline std::vector<CheckResult> measures_properties() {
  using detail::make;
  std::vector<CheckResult> out;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0, 1);

  out.push_back(detail::guarded("relative entropy nonnegative, zero only at equality", [&] {
    double worst_self = 0, min_other = 1e300;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> x(10), wq(10), wn(10);
      double s = 0;
      for (int i = 0; i < 10; ++i) {
        x[i] = i;
        wq[i] = u(rng);
        s += wq[i];
        wn[i] = 2 * u(rng);
      }
      for (auto& v : wq) v /= s;
      DiscreteMeasure q(x, wq), nu(x, wn);
      worst_self = std::max(worst_self, detail::to_d(relative_entropy(q, q)));
      min_other = std::min(min_other, detail::to_d(relative_entropy(q, nu)));
    }
    return make("relative entropy nonnegative, zero only at equality", worst_self <= 1e-15 && min_other > 0,
                "max H(q|q) = " + detail::num(worst_self) + ", min H(q|nu) = " + detail::num(min_other));
  }));

  out.push_back(detail::guarded("relative entropy scaling H(q|yq) = 2 J1(y)", [&] {
    double worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
      auto q = detail::random_probability(rng, 12, -2, 2);
      for (double y : {0.1, 0.5, 1.0, 2.0, 7.0}) {
        const double a = detail::to_d(relative_entropy(q, q.scaled(y)));
        worst = std::max(worst, std::abs(a - 2 * j1(y).value()));
      }
    }
    return make("relative entropy scaling H(q|yq) = 2 J1(y)", worst <= 1e-12, "max error " + detail::num(worst));
  }));

  out.push_back(detail::guarded("J_alpha at alpha = 1 equals J1", [&] {
    double worst = 0;
    for (int i = 1; i <= 200; ++i) {
      const double y = 0.05 * i;
      worst = std::max(worst, std::abs(j_alpha(y, 1).value() - j1(y).value()));
    }
    return make("J_alpha at alpha = 1 equals J1", worst <= 1e-15, "max error " + detail::num(worst));
  }));

  out.push_back(detail::guarded("Stieltjes transform strictly decreasing above support", [&] {
    bool ok = true;
    for (int trial = 0; trial < 50 && ok; ++trial) {
      auto nu = detail::random_probability(rng, 8, -1, 1);
      double prev = 1e300;
      for (int k = 1; k <= 200; ++k) {
        const double g = stieltjes_discrete(nu, nu.highest() + 0.01 * k);
        if (!(g < prev)) ok = false;
        prev = g;
      }
    }
    return make("Stieltjes transform strictly decreasing above support", ok, ok ? "ok" : "non-monotone");
  }));

  out.push_back(detail::guarded("log-potential difference equals integrated Stieltjes transform", [&] {
    double worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
      auto nu = detail::random_probability(rng, 8, -1, 1);
      const double a = nu.highest() + 0.05 + u(rng), b = a + 3 * u(rng);
      const double quad = oracle::integrate([&](double xi) { return stieltjes_discrete(nu, xi); }, a, b);
      worst = std::max(worst, std::abs(logpot_diff_discrete(nu, a, b) - quad));
    }
    return make("log-potential difference equals integrated Stieltjes transform", worst <= 1e-10,
                "max error " + detail::num(worst));
  }));
  return out;
}

// ---------------------------------------------------------------- sphereopt

namespace detail {

struct RandomInstance {
  OrderedSpectrum lambda{std::vector<double>{0.0}};
  std::vector<double> h;
};

inline RandomInstance random_instance(std::mt19937_64& rng, std::size_t n, bool zero_top) {
  std::uniform_real_distribution<double> u(-2, 2);
  std::normal_distribution<double> g(0, 1);
  std::vector<double> l(n), h(n);
  for (auto& v : l) v = u(rng);
  std::sort(l.begin(), l.end(), std::greater<>());
  for (auto& v : h) v = g(rng) / std::sqrt(static_cast<double>(n));
  if (zero_top && n > 1) h[0] = 0;
  return {OrderedSpectrum(std::move(l)), std::move(h)};
}

inline double secular_vs_big_f(const RandomInstance& inst) {
  double gamma = 0;
  for (double v : inst.h) gamma += v * v;
  std::vector<double> w(inst.h.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = inst.h[i] * inst.h[i] / gamma;
  const DiscreteMeasure nu(inst.lambda.values(), w);
  const double a = solve_secular(inst.lambda, inst.h).f_star;
  const double b = big_f(inst.lambda.top(), nu, gamma);
  return std::abs(a - b) / std::max(1.0, std::abs(a));
}

}  // namespace detail

inline std::vector<CheckResult> sphereopt_properties() {
  using detail::make;
  std::vector<CheckResult> out;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0, 1);

  out.push_back(detail::guarded("secular solution invariants", [&] {
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      auto inst = detail::random_instance(rng, 1 + trial % 20, false);
      auto s = solve_secular(inst.lambda, inst.h);
      if (s.boundary || !s.optimizer) continue;
      double sec = 0, nrm = 0, lin = 0;
      for (std::size_t i = 0; i < inst.h.size(); ++i) {
        const double d = s.theta_star - inst.lambda[i];
        sec += inst.h[i] * inst.h[i] / (d * d);
        lin += inst.h[i] * inst.h[i] / d;
        nrm += (*s.optimizer)[i] * (*s.optimizer)[i];
      }
      worst = std::max({worst, std::abs(sec - 1), std::abs(std::sqrt(nrm) - 1),
                        std::abs(s.f_star - 0.5 * (s.theta_star + lin)) / std::max(1.0, std::abs(s.f_star))});
    }
    return make("secular solution invariants", worst <= 1e-9, "max residual " + detail::num(worst));
  }));

  out.push_back(detail::guarded("shift covariance of the sphere optimum", [&] {
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      auto inst = detail::random_instance(rng, 1 + trial % 20, trial % 4 == 0);
      const double c = 6 * u(rng) - 3;
      const double a = solve_secular(inst.lambda.shifted(c), inst.h).f_star;
      const double b = solve_secular(inst.lambda, inst.h).f_star + 0.5 * c;
      worst = std::max(worst, std::abs(a - b));
    }
    return make("shift covariance of the sphere optimum", worst <= 1e-9, "max error " + detail::num(worst));
  }));

  out.push_back(detail::guarded("sign invariance of the sphere optimum", [&] {
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      auto inst = detail::random_instance(rng, 1 + trial % 20, false);
      auto ah = inst.h;
      for (auto& v : ah) v = std::abs(v);
      worst = std::max(worst, std::abs(solve_secular(inst.lambda, inst.h).f_star -
                                       solve_secular(inst.lambda, ah).f_star));
    }
    return make("sign invariance of the sphere optimum", worst <= 1e-12, "max error " + detail::num(worst));
  }));

  out.push_back(detail::guarded("sphere optimum equals F functional of the field measure", [&] {
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial)
      worst = std::max(worst, detail::secular_vs_big_f(detail::random_instance(rng, 1 + trial % 20, trial % 3 == 0)));
    return make("sphere optimum equals F functional of the field measure", worst <= 1e-9,
                "max relative error " + detail::num(worst));
  }));

  out.push_back(detail::guarded("F concave in nu", [&] {
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      auto a = detail::random_probability(rng, 6, -2, 2), b = detail::random_probability(rng, 6, -2, 2);
      const double xi = std::max(a.highest(), b.highest()) + 0.5 * u(rng);
      const double gamma = 0.1 + 3 * u(rng);
      const double lhs = 2 * big_f(xi, a + b, gamma);
      const double rhs = big_f(xi, a.scaled(2), gamma) + big_f(xi, b.scaled(2), gamma);
      worst = std::min(worst, lhs - rhs);
    }
    return make("F concave in nu", worst >= -1e-12, "min slack " + detail::num(worst));
  }));

  out.push_back(detail::guarded("F of probability measures within the Haar window", [&] {
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const double lm = -2 + u(rng), lp = lm + 0.5 + 3 * u(rng);
      auto nu = detail::random_probability(rng, 8, lm, lp);
      const double gamma = 0.1 + 3 * u(rng);
      const double f = big_f(lp, nu, gamma);
      worst = std::min({worst, f - haar_m_minus(lp, lm, gamma), haar_m_plus(lp, gamma) - f});
    }
    return make("F of probability measures within the Haar window", worst >= -1e-12,
                "min slack " + detail::num(worst));
  }));
  return out;
}

// ---------------------------------------------------------------- ensembles

namespace detail {

inline SymmetricMatrix conjugate(const SymmetricMatrix& w, const EigenDecomposition& q) {
  // returns Q^T W Q, Q has columns q.vectors rows
  const std::size_t n = w.order();
  const auto a = w.dense();
  std::vector<double> tmp(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * q.vec(k, j);
      tmp[i * n + k] = s;
    }
  SymmetricMatrix out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = r; k < n; ++k) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += q.vec(r, i) * tmp[i * n + k];
      out.set(r, k, s);
    }
  return out;
}

}  // namespace detail

inline std::vector<CheckResult> ensembles_properties() {
  using detail::make;
  std::vector<CheckResult> out;

  out.push_back(detail::guarded("eigendecomposition reconstruction and orthogonality", [&] {
    double worst_rec = 0, worst_orth = 0;
    for (EigenMethod method : {EigenMethod::jacobi, EigenMethod::tridiagonal}) {
      for (std::size_t n : {1u, 2u, 5u, 17u, 40u}) {
        const auto w = sample_goe(n, {99, n});
        EigenOptions opt;
        opt.method = method;
        const auto e = spectrum(w, opt);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            double rec = 0, orth = 0;
            for (std::size_t k = 0; k < n; ++k) {
              rec += e.vec(k, i) * e.values[k] * e.vec(k, j);
              orth += e.vec(i, k) * e.vec(j, k);
            }
            worst_rec = std::max(worst_rec, std::abs(rec - w(i, j)) / std::max(1e-300, w.max_abs()));
            worst_orth = std::max(worst_orth, std::abs(orth - (i == j ? 1.0 : 0.0)));
          }
      }
    }
    return make("eigendecomposition reconstruction and orthogonality", worst_rec <= 1e-8 && worst_orth <= 1e-10,
                "reconstruction " + detail::num(worst_rec) + ", orthogonality " + detail::num(worst_orth));
  }));

  out.push_back(detail::guarded("F invariant under orthogonal conjugation", [&] {
    double worst = 0;
    for (std::uint64_t t = 0; t < 20; ++t) {
      const std::size_t n = 2 + t % 12;
      const auto w = sample_goe(n, {7, t});
      const auto h = sample_haar_sphere(n, 0.5 + static_cast<double>(t % 3), {8, t});
      const auto q = spectrum(sample_goe(n, {9, t}));
      const auto wq = detail::conjugate(w, q);
      const auto hq = q.rotate(h);
      worst = std::max(worst, std::abs(f_value(wq, hq) - f_value(w, h)));
    }
    return make("F invariant under orthogonal conjugation", worst <= 1e-8, "max error " + detail::num(worst));
  }));

  out.push_back(detail::guarded("sandwich bound lambda1/2 <= F <= lambda1/2 + |h|", [&] {
    double worst = 0;
    for (std::uint64_t t = 0; t < 50; ++t) {
      const std::size_t n = 1 + t % 30;
      const auto w = sample_goe(n, {11, t});
      const auto h = sample_gauss_field(n, 0.3 + static_cast<double>(t % 5), {12, t});
      const auto s = f_value_detail(w, h);
      double nh = 0;
      for (double v : h) nh += v * v;
      worst = std::min({worst, s.f - 0.5 * s.lambda1, 0.5 * s.lambda1 + std::sqrt(nh) - s.f});
    }
    return make("sandwich bound lambda1/2 <= F <= lambda1/2 + |h|", worst >= -1e-12,
                "min slack " + detail::num(worst));
  }));

  out.push_back(detail::guarded("sampling deterministic in (seed, stream)", [&] {
    bool ok = sample_goe(30, {5, 6}).packed() == sample_goe(30, {5, 6}).packed() &&
              sample_haar_sphere(30, 2, {5, 7}) == sample_haar_sphere(30, 2, {5, 7}) &&
              sample_gauss_field(30, 2, {5, 7}) == sample_gauss_field(30, 2, {5, 7}) &&
              sample_goe(30, {5, 6}).packed() != sample_goe(30, {5, 8}).packed();
    return make("sampling deterministic in (seed, stream)", ok, ok ? "ok" : "mismatch");
  }));
  return out;
}

// ---------------------------------------------------------------- rates_closed

inline std::vector<CheckResult> rates_closed_properties() {
  using detail::make;
  std::vector<CheckResult> out;
  auto qv = [](double m, double g) { return quenched_gauss_semicircle(m, g).value.value(); };
  auto av = [](double m, double g) { return annealed_gauss(m, g).value.value(); };

  out.push_back(detail::guarded("phase constants ordered, m_c identity", [&] {
    bool ok = true;
    double worst = 0;
    for (double g : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      auto c = phase_constants(g);
      ok = ok && 1 < c.m_c && c.m_c < c.m_L && c.m_L < c.m_bar && c.m_bar < c.m_U;
      worst = std::max(worst, std::abs(c.m_c * c.m_c - (1 + g / (1 + g))));
    }
    return make("phase constants ordered, m_c identity", ok && worst <= 1e-14, "identity error " + detail::num(worst));
  }));

  out.push_back(detail::guarded("closed-form branches continuous at m_L and m_U", [&] {
    double worst = 0;
    for (double g : {0.5, 1.0, 10.0}) {
      auto c = phase_constants(g);
      worst = std::max(worst, std::abs(qv(c.m_L, g) - qv(c.m_L + 1e-12, g)));
      worst = std::max(worst, std::abs(qv(c.m_U - 1e-12, g) - qv(c.m_U, g)));
      worst = std::max(worst, std::abs(av(c.m_U, g) - av(c.m_U + 1e-12, g)));
    }
    return make("closed-form branches continuous at m_L and m_U", worst <= 1e-10, "max jump " + detail::num(worst));
  }));

  out.push_back(detail::guarded("slope at m_L equals -Gamma/(1+Gamma) from both sides", [&] {
    double worst = 0;
    const double h = 1e-6;
    for (double g : {1.0, 10.0}) {
      auto c = phase_constants(g);
      const double eta = g / (1 + g);
      const double left = (av(c.m_L, g) - av(c.m_L - h, g)) / h;
      const double right = (av(c.m_L + h, g) - av(c.m_L, g)) / h;
      worst = std::max({worst, std::abs(left + eta), std::abs(right + eta)});
    }
    return make("slope at m_L equals -Gamma/(1+Gamma) from both sides", worst <= 1e-4,
                "max slope error " + detail::num(worst));
  }));

  out.push_back(detail::guarded("quenched rate not smooth at m_U", [&] {
    bool ok = true;
    std::string msg;
    for (double g : {1.0, 10.0}) {
      const double mu = phase_constants(g).m_U;
      auto left = [&](double h) {
        return (qv(mu, g) - 3 * qv(mu - h, g) + 3 * qv(mu - 2 * h, g) - qv(mu - 3 * h, g)) / (h * h * h);
      };
      auto right = [&](double h) {
        return (qv(mu + 3 * h, g) - 3 * qv(mu + 2 * h, g) + 3 * qv(mu + h, g) - qv(mu, g)) / (h * h * h);
      };
      const double h = 3e-3;
      const double jump = std::abs(left(h / 3) - right(h / 3));
      const double noise = std::abs(left(h) - left(h / 3)) + std::abs(right(h) - right(h / 3));
      ok = ok && jump > 10 * noise;
      msg += "gamma " + detail::num(g) + ": third-difference jump " + detail::num(jump) + ", noise " + detail::num(noise) + "; ";
    }
    return make("quenched rate not smooth at m_U", ok, msg);
  }));

  out.push_back(detail::guarded("annealed rate strictly convex", [&] {
    double worst = 1e300;
    for (double g : {1.0, 10.0})
      for (double m = 1.02; m < 4; m += 0.01) worst = std::min(worst, av(m + 0.01, g) - 2 * av(m, g) + av(m - 0.01, g));
    return make("annealed rate strictly convex", worst > 0, "min second difference " + detail::num(worst));
  }));

  out.push_back(detail::guarded("quenched rate decreasing to m_bar then increasing", [&] {
    bool ok = true;
    for (double g : {0.5, 1.0, 10.0}) {
      const double mb = phase_constants(g).m_bar;
      double prev = 1e300;
      for (int k = 1; k <= 400; ++k) {
        const double m = 1 + (mb - 1) * k / 400.0, v = qv(m, g);
        ok = ok && v <= prev + 1e-14;
        prev = v;
      }
      for (int k = 1; k <= 400; ++k) {
        const double m = mb + 3.0 * k / 400.0, v = qv(m, g);
        ok = ok && v > prev;
        prev = v;
      }
    }
    return make("quenched rate decreasing to m_bar then increasing", ok, ok ? "ok" : "monotonicity violated");
  }));

  out.push_back(detail::guarded("annealed tail parameter solves its quadratic", [&] {
    double worst = 0;
    for (double g : {1.0, 10.0}) {
      auto c = phase_constants(g);
      for (double m = c.m_U + 0.01; m < c.m_U + 3; m += 0.05) {
        const double a = annealed_gauss(m, g).alpha;
        worst = std::max(worst, std::abs(c.m_c * c.m_c * a * a - 2 * m * a + 1));
      }
    }
    return make("annealed tail parameter solves its quadratic", worst <= 1e-10, "max residual " + detail::num(worst));
  }));

  out.push_back(detail::guarded("annealed tail splits into shifted quenched rate plus I_e", [&] {
    double worst_id = 0, worst_var = 0;
    for (double g : {1.0, 10.0}) {
      auto c = phase_constants(g);
      for (double m = c.m_U + 0.05; m < c.m_U + 2; m += 0.25) {
        const auto p = annealed_gauss(m, g);
        const double a = p.alpha, b = 1 / p.beta;
        const double shifted = 0.5 * ((p.theta - p.psi) / b + 0.5 * (1 / (b * b) - 1 / (a * a)) - std::log(a / b));
        worst_id = std::max(worst_id, std::abs(shifted - p.value.value()));
        const auto v = quenched_rate(SemicircleModel{}, p.psi, -2.0, g, m, Flavor::gauss);
        worst_var = std::max(worst_var, std::abs(v.value.value() + ie(p.psi).value() - p.value.value()));
      }
    }
    return make("annealed tail splits into shifted quenched rate plus I_e", worst_id <= 1e-10 && worst_var <= 1e-8,
                "identity " + detail::num(worst_id) + ", variational " + detail::num(worst_var));
  }));

  out.push_back(detail::guarded("rates vanish at m_bar", [&] {
    double worst = 0;
    for (double g : {0.5, 1.0, 10.0}) {
      const double mb = phase_constants(g).m_bar;
      worst = std::max({worst, std::abs(qv(mb, g)), std::abs(av(mb, g)), std::abs(fld_rate(mb, g).value())});
    }
    return make("rates vanish at m_bar", worst <= 1e-12, "max |rate| " + detail::num(worst));
  }));
  return out;
}

// ---------------------------------------------------------------- rates_variational

namespace detail {

struct StateCase {
  VariationalResult r;
  double lp, lm, psi_star, gamma, m, mbar;
  Flavor flavor;
  std::vector<double> support;  // points where the tilt is checked
};

template <SpectralModel M>
StateCase state_case(const M& q, double lp, double lm, double gamma, double m, Flavor fl,
                     std::vector<double> support) {
  StateCase c{quenched_rate(q, lp, lm, gamma, m, fl), lp, lm, 0, gamma, m, f_functional(q, lp, gamma).value, fl,
              std::move(support)};
  c.psi_star = (fl == Flavor::gauss || m > c.mbar) ? lp : lm;
  return c;
}

inline std::vector<StateCase> state_cases() {
  std::vector<StateCase> out;
  std::vector<double> grid;
  for (int k = 0; k <= 40; ++k) grid.push_back(-2 + 0.1 * k);
  for (double g : {0.5, 1.0, 4.0}) {
    const double mb = std::sqrt(1 + g);
    for (double m = 1.02; m < mb + 2; m += 0.1)
      out.push_back(state_case(SemicircleModel{}, 2, -2, g, m, Flavor::gauss, grid));
    const double lo = haar_m_minus(2, -2, g), hi = haar_m_plus(2, g);
    for (int k = 1; k < 20; ++k)
      out.push_back(state_case(SemicircleModel{}, 2, -2, g, lo + (hi - lo) * k / 20.0, Flavor::haar, grid));
  }
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 16; ++t) {
    auto q = random_probability(rng, 30, -1, 1.5);
    const double gamma = 0.2 + 2 * u(rng);
    const double shift = t % 2 ? 0.4 * u(rng) : 0.0;
    const double lp = q.highest() + shift, lm = q.lowest() - shift;
    const DiscreteModel dm(q);
    const double mb = f_functional(dm, lp, gamma).value;
    for (double m : {0.5 * lp + 0.3 * (mb - 0.5 * lp), mb + 0.3 * u(rng), mb + 1.2})
      out.push_back(state_case(dm, lp, lm, gamma, m, Flavor::gauss, q.atoms()));
    const double lo = haar_m_minus(lp, lm, gamma), hi = haar_m_plus(lp, gamma);
    for (double f : {0.15, 0.45, 0.7, 0.9})
      out.push_back(state_case(dm, lp, lm, gamma, lo + (hi - lo) * f, Flavor::haar, q.atoms()));
  }
  return out;
}

}  // namespace detail

inline std::vector<CheckResult> rates_variational_properties() {
  using detail::make;
  std::vector<CheckResult> out;
  const auto cases = detail::state_cases();

  out.push_back(detail::guarded("stationarity residuals of returned states", [&] {
    double worst = 0;
    std::size_t finite = 0;
    for (auto& c : cases) {
      if (!c.r.value.finite()) continue;
      ++finite;
      worst = std::max(worst, c.r.state.residual);
    }
    return make("stationarity residuals of returned states", worst <= 1e-9 && finite > 0,
                std::to_string(finite) + " states, max residual " + detail::num(worst));
  }));

  out.push_back(detail::guarded("atom only at the pinned edge", [&] {
    bool ok = true;
    for (auto& c : cases)
      if (c.r.value.finite() && c.r.state.t > 0) ok = ok && std::abs(c.r.state.psi - c.psi_star) <= 1e-12;
    return make("atom only at the pinned edge", ok, ok ? "ok" : "t > 0 with psi != psi*");
  }));

  out.push_back(detail::guarded("tilt profile positive and monotone", [&] {
    bool ok = true;
    std::string bad;
    for (auto& c : cases) {
      if (!c.r.value.finite() || std::abs(c.m - c.mbar) < 1e-9) continue;
      if (std::abs(c.r.state.psi) > 1e11) continue;
      double prev = c.m > c.mbar ? -1e300 : 1e300;
      for (double x : c.support) {
        if (x >= c.r.state.theta || std::abs(x - c.r.state.psi) <= 1e-12) continue;
        const double phi = tilt_profile(c.r.state, x);
        const bool mono = c.m > c.mbar ? phi >= prev * (1 - 1e-12) : phi <= prev * (1 + 1e-12);
        if (!(phi > 0) || !mono) {
          ok = false;
          bad = "m=" + detail::num(c.m) + " x=" + detail::num(x) + " phi=" + detail::num(phi);
        }
        prev = phi;
      }
    }
    return make("tilt profile positive and monotone", ok, ok ? "ok" : bad);
  }));

  out.push_back(detail::guarded("interior theta satisfies D(theta) = 1", [&] {
    double worst = 0;
    std::mt19937_64 rng(404);
    for (double g : {0.5, 1.0, 4.0}) {
      const double mb = std::sqrt(1 + g);
      for (double m = 1.05; m < mb + 2; m += 0.2) {
        auto r = quenched_rate(SemicircleModel{}, 2, -2, g, m, Flavor::gauss);
        if (r.state.theta > 2 + 1e-9) worst = std::max(worst, std::abs(const0_d(SemicircleModel{}, r.state, 2, g) - 1));
      }
      const double lo = haar_m_minus(2, -2, g), hi = haar_m_plus(2, g);
      for (int k = 1; k < 20; ++k) {
        const double m = lo + (hi - lo) * k / 20.0;
        auto r = quenched_rate(SemicircleModel{}, 2, -2, g, m, Flavor::haar);
        const double ps = m > mb ? 2 : -2;
        if (r.value.finite() && r.state.theta > 2 + 1e-9 && std::abs(r.state.psi) < 1e11)
          worst = std::max(worst, std::abs(const0_d(SemicircleModel{}, r.state, ps, g) - 1));
      }
    }
    for (int t = 0; t < 10; ++t) {
      auto q = detail::random_probability(rng, 30, -1, 1.5);
      const DiscreteModel dm(q);
      const double lp = q.highest() + 0.2 * (t % 2), lm = q.lowest(), g = 0.5 + 0.2 * t;
      const double mb = f_functional(dm, lp, g).value;
      for (double m : {mb - 0.05, mb + 0.1, mb + 0.8}) {
        auto r = quenched_rate(dm, lp, lm, g, m, Flavor::gauss);
        if (r.value.finite() && r.state.theta > lp + 1e-9)
          worst = std::max(worst, std::abs(const0_d(dm, r.state, lp, g) - 1));
      }
    }
    return make("interior theta satisfies D(theta) = 1", worst <= 1e-8, "max |D - 1| " + detail::num(worst));
  }));

  out.push_back(detail::guarded("Gaussian-field rate below Haar-field rate", [&] {
    double worst = 0;
    std::mt19937_64 rng(505);
    for (int t = 0; t < 10; ++t) {
      auto q = detail::random_probability(rng, 30, -1, 1.5);
      const double g = 0.3 + 0.3 * t;
      const double lo = haar_m_minus(q.highest(), q.lowest(), g), hi = haar_m_plus(q.highest(), g);
      for (int k = 1; k < 15; ++k) {
        const double m = lo + (hi - lo) * k / 15.0;
        const auto a = quenched_gauss_general(q, q.lowest(), q.highest(), g, m).value;
        const auto b = quenched_haar_general(q, q.lowest(), q.highest(), g, m).value;
        if (b.finite()) worst = std::min(worst, b.value() - a.value());
      }
    }
    return make("Gaussian-field rate below Haar-field rate", worst >= -1e-10, "min slack " + detail::num(worst));
  }));

  out.push_back(detail::guarded("Gaussian-field rate independent of the lower edge", [&] {
    double worst = 0;
    std::mt19937_64 rng(606);
    for (int t = 0; t < 10; ++t) {
      auto q = detail::random_probability(rng, 30, -1, 1.5);
      const double g = 0.3 + 0.3 * t, mb = mbar(q, q.highest(), g);
      for (double m : {0.5 * q.highest() + 0.1, mb + 0.4}) {
        const double a = detail::to_d(quenched_gauss_general(q, q.lowest(), q.highest(), g, m).value);
        const double b = detail::to_d(quenched_gauss_general(q, q.lowest() - 1.7, q.highest(), g, m).value);
        worst = std::max(worst, std::abs(a - b));
      }
    }
    return make("Gaussian-field rate independent of the lower edge", worst <= 1e-12, "max change " + detail::num(worst));
  }));

  out.push_back(detail::guarded("shifted-edge Haar rate consistent and monotone in the edge", [&] {
    double worst_eq = 0, worst_mono = 0;
    std::mt19937_64 rng(707);
    for (int t = 0; t < 8; ++t) {
      auto q = detail::random_probability(rng, 30, -1, 1.5);
      const double g = 0.4 + 0.3 * t, mb = mbar(q, q.highest(), g);
      for (double m : {0.5 * (mb + haar_m_minus(q.highest(), q.lowest(), g)), mb + 0.3}) {
        const double a = detail::to_d(quenched_haar_shifted_edge(q, q.highest(), q.lowest(), g, m));
        const double b = detail::to_d(quenched_haar_general(q, q.lowest(), q.highest(), g, m).value);
        worst_eq = std::max(worst_eq, std::abs(a - b));
      }
      const double m = mb + 0.3;
      Extended prev = Extended::infinity();
      for (int k = 0; k <= 10; ++k) {
        const Extended v = quenched_haar_shifted_edge(q, q.highest() + 0.05 * k, q.lowest(), g, m);
        if (prev.finite()) worst_mono = std::max(worst_mono, detail::to_d(v) - prev.value());
        prev = v;
      }
    }
    return make("shifted-edge Haar rate consistent and monotone in the edge", worst_eq <= 1e-12 && worst_mono <= 1e-12,
                "consistency " + detail::num(worst_eq) + ", max increase " + detail::num(worst_mono));
  }));

  out.push_back(detail::guarded("rates vanish at m_bar with trivial multipliers", [&] {
    bool ok = true;
    std::mt19937_64 rng(808);
    for (int t = 0; t < 10; ++t) {
      auto q = detail::random_probability(rng, 30, -1, 1.5);
      const double g = 0.3 + 0.3 * t, mb = mbar(q, q.highest(), g);
      for (auto r : {quenched_gauss_general(q, q.lowest(), q.highest(), g, mb),
                     quenched_haar_general(q, q.lowest(), q.highest(), g, mb)})
        ok = ok && r.value == Extended(0.0) && r.state.b == 1 && r.state.theta == r.state.psi && r.state.t == 0;
      ok = ok && direct_minimize_oracle(q, q.highest(), q.highest(), g, mb, Flavor::gauss) == Extended(0.0);
    }
    return make("rates vanish at m_bar with trivial multipliers", ok, ok ? "ok" : "nonzero at m_bar");
  }));

  out.push_back(detail::guarded("general Gaussian-field rate decreasing then convex increasing", [&] {
    bool ok = true;
    std::mt19937_64 rng(909);
    for (int t = 0; t < 6; ++t) {
      auto q = detail::random_probability(rng, 30, -1, 1.5);
      const double g = 0.5 + 0.4 * t, lp = q.highest(), mb = mbar(q, lp, g);
      double prev = 1e300;
      for (int k = 1; k <= 30; ++k) {
        const double v = detail::to_d(quenched_gauss_general(q, q.lowest(), lp, g, 0.5 * lp + (mb - 0.5 * lp) * k / 30.0).value);
        ok = ok && v <= prev + 1e-12;
        prev = v;
      }
      std::vector<double> vals;
      for (int k = 0; k <= 30; ++k) vals.push_back(quenched_gauss_general(q, q.lowest(), lp, g, mb + 0.05 * k).value.value());
      for (std::size_t k = 1; k < vals.size(); ++k) ok = ok && vals[k] > vals[k - 1];
      for (std::size_t k = 1; k + 1 < vals.size(); ++k) ok = ok && vals[k + 1] - 2 * vals[k] + vals[k - 1] >= -1e-10;
    }
    return make("general Gaussian-field rate decreasing then convex increasing", ok, ok ? "ok" : "shape violated");
  }));

  out.push_back(detail::guarded("annealed Gaussian optimum keeps the edge at 2 below m_bar", [&] {
    double worst = 0;
    const DiscreteModel dm(semicircle_discretization(400));
    for (double m : {1.1, 1.25, 1.35}) worst = std::max(worst, std::abs(annealed_rate(dm, m, 1.0, Flavor::gauss).psi_star - 2));
    return make("annealed Gaussian optimum keeps the edge at 2 below m_bar", worst <= 1e-6,
                "max |psi* - 2| " + detail::num(worst));
  }));
  return out;
}

// ---------------------------------------------------------------- mc

inline std::vector<CheckResult> mc_properties() {
  using detail::make;
  std::vector<CheckResult> out;

  out.push_back(detail::guarded("experiment tables independent of worker count", [&] {
    ExperimentConfig c;
    c.mode = ExperimentMode::quenched_fixed_spectrum;
    c.field = FieldKind::haar;
    c.n_list = {5, 10};
    c.samples_per_n = 3000;
    c.m_grid = {1.2, 1.5, 1.8};
    c.seed = {17, 3};
    std::ostringstream a, b, x, y;
    c.workers = 1;
    write_results_csv(a, run_experiment(c));
    c.workers = 3;
    write_results_csv(b, run_experiment(c));
    c.mode = ExperimentMode::annealed_goe;
    c.samples_per_n = 40;
    c.workers = 1;
    write_results_csv(x, run_experiment(c));
    c.workers = 2;
    write_results_csv(y, run_experiment(c));
    const bool ok = a.str() == b.str() && x.str() == y.str();
    return make("experiment tables independent of worker count", ok, ok ? "identical" : "tables differ");
  }));

  out.push_back(detail::guarded("wide window gives zero empirical rate", [&] {
    ExperimentConfig c;
    c.n_list = {8};
    c.samples_per_n = 500;
    c.m_grid = {1.4};
    c.delta = 100;
    auto r = run_experiment(c);
    bool ok = false;
    for (auto& e : r.estimates)
      if (e.convention == Convention::window) ok = e.rate_hat == Extended(0.0) && e.count == e.total;
    return make("wide window gives zero empirical rate", ok, ok ? "ok" : "nonzero");
  }));

  out.push_back(detail::guarded("Wilson interval brackets the estimate", [&] {
    bool ok = true;
    for (std::uint64_t total : {1u, 10u, 1000u})
      for (std::uint64_t count = 0; count <= total; count += std::max<std::uint64_t>(1, total / 7)) {
        auto w = wilson_interval(count, total);
        const double p = static_cast<double>(count) / static_cast<double>(total);
        ok = ok && w.low <= p + 1e-15 && p <= w.high + 1e-15 && w.low >= 0 && w.high <= 1;
      }
    return make("Wilson interval brackets the estimate", ok, ok ? "ok" : "bad interval");
  }));

  out.push_back(detail::guarded("block entropy rate zero at the typical point", [&] {
    const std::array<double, 2> mu{0.5, 0.5}, x{0.5, 0.5}, y{0.75, 0.25};
    const double a = chi_square_block_rate(mu, x).value(), b = chi_square_block_rate(mu, y).value();
    const bool ok = a == 0 && std::abs(b - 0.25 * std::log(4.0 / 3.0)) <= 1e-15;
    return make("block entropy rate zero at the typical point", ok, "rate at (3/4,1/4) " + detail::num(b));
  }));
  return out;
}

inline std::vector<CheckResult> property_checks() {
  std::vector<CheckResult> all;
  for (auto&& group : {measures_properties(), sphereopt_properties(), ensembles_properties(),
                       rates_closed_properties(), rates_variational_properties(), mc_properties()})
    all.insert(all.end(), group.begin(), group.end());
  return all;
}

// ---------------------------------------------------------------- acceptance

inline CheckResult criterion_phase_constants() {
  auto a = phase_constants(1), b = phase_constants(10);
  const bool ok = a.m_L == 1.25 && a.m_U == 1.75 && std::abs(b.m_c - 1.382) <= 1e-3 && std::abs(b.m_L - 1.454) <= 1e-3;
  return detail::make("phase constants", ok,
                      "gamma=1: m_L=" + io::fmt(a.m_L) + " m_U=" + io::fmt(a.m_U) + "; gamma=10: m_c=" + io::fmt(b.m_c) +
                          " m_L=" + io::fmt(b.m_L));
}

inline CheckResult criterion_fld() {
  double worst = 0, min_gap = 1e300;
  for (double g : {1.0, 10.0}) {
    auto c = phase_constants(g);
    for (int k = 0; k < 500; ++k) {
      const double m = c.m_L + (3 - c.m_L) * k / 499.0;
      worst = std::max(worst, std::abs(annealed_gauss(m, g).value.value() - fld_rate(m, g).value()));
    }
  }
  auto c = phase_constants(10);
  const double lo = c.m_c + 1e-3, hi = c.m_L - 1e-3;
  for (int k = 0; k < 500; ++k) {
    const double m = lo + (hi - lo) * k / 499.0;
    min_gap = std::min(min_gap, fld_rate(m, 10).value() - annealed_gauss(m, 10).value.value());
  }
  return detail::make("FLD agreement above m_L and excess below", worst <= 1e-9 && min_gap > 0,
                      "max |annealed - fld| on [m_L,3] = " + detail::num(worst) +
                          ", min (fld - annealed) on (m_c,m_L), gamma=10 = " + detail::num(min_gap));
}

inline CheckResult criterion_closed_vs_variational() {
  const auto q = semicircle_discretization(2000);
  double wq = 0, wa = 0;
  for (double m : {1.1, 1.3, 1.5, 2.0, 2.5}) {
    wq = std::max(wq, std::abs(quenched_gauss_general(q, -2, 2, 1, m).value.value() -
                               quenched_gauss_semicircle(m, 1).value.value()));
    wa = std::max(wa, std::abs(annealed_general_gauss(m, 1).value() - annealed_gauss(m, 1).value.value()));
  }
  return detail::make("closed form vs variational, 2000-atom semicircle", wq <= 2e-3 && wa <= 2e-3,
                      "quenched max diff " + detail::num(wq) + ", annealed max diff " + detail::num(wa));
}

inline CheckResult criterion_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  int cases = 0;
  for (int t = 0; t < 20; ++t) {
    auto q = detail::random_probability(rng, 50, -1.5 + u(rng), 1 + u(rng));
    const double g = 0.2 + 3 * u(rng), lp = q.highest(), lm = q.lowest(), mb = mbar(q, lp, g);
    const double mg = 0.5 * lp + (mb + 1.5 - 0.5 * lp) * (0.02 + 0.96 * u(rng));
    const auto a = quenched_gauss_general(q, lm, lp, g, mg).value;
    const auto oa = direct_minimize_oracle(q, lp, lp, g, mg, Flavor::gauss);
    const double lo = haar_m_minus(lp, lm, g), hi = haar_m_plus(lp, g);
    const double mh = lo + (hi - lo) * (0.02 + 0.96 * u(rng));
    const auto b = quenched_haar_general(q, lm, lp, g, mh).value;
    const auto ob = direct_minimize_oracle(q, lp, mh > mb ? lp : lm, g, mh, Flavor::haar);
    worst = std::max({worst, std::abs(detail::to_d(a) - detail::to_d(oa)), std::abs(detail::to_d(b) - detail::to_d(ob))});
    cases += 2;
  }
  return detail::make("variational solvers vs direct-minimization oracle", worst <= 1e-6,
                      std::to_string(cases) + " cases, max diff " + detail::num(worst));
}

inline CheckResult criterion_secular() {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(-2, 2);
  std::normal_distribution<double> nrm(0, 1);
  double worst_grid = 0, worst_id = 0;
  for (int t = 0; t < 100; ++t) {
    std::array<double, 3> l{u(rng), u(rng), u(rng)}, h{nrm(rng), nrm(rng), nrm(rng)};
    std::sort(l.begin(), l.end(), std::greater<>());
    const double a = solve_secular(OrderedSpectrum({l[0], l[1], l[2]}), std::vector<double>(h.begin(), h.end())).f_star;
    worst_grid = std::max(worst_grid, std::abs(a - oracle::sphere_grid_max(l, h)));
  }
  for (int t = 0; t < 100; ++t)
    worst_id = std::max(worst_id, detail::secular_vs_big_f(detail::random_instance(rng, 1 + t % 20, t % 3 == 0)));
  return detail::make("secular solver vs sphere grid and F identity", worst_grid <= 1e-3 && worst_id <= 1e-9,
                      "grid oracle max diff " + detail::num(worst_grid) + ", identity max rel diff " + detail::num(worst_id));
}

inline CheckResult criterion_annealed_equals_quenched() {
  const double mu = phase_constants(1).m_U;
  double worst = 0;
  for (int k = 0; k < 200; ++k) {
    const double m = 1.01 + (mu - 1.01) * k / 199.0;
    worst = std::max(worst, std::abs(annealed_gauss(m, 1).value.value() - quenched_gauss_semicircle(m, 1).value.value()));
  }
  return detail::make("annealed equals quenched below m_U", worst <= 1e-12, "max diff " + detail::num(worst));
}

inline CheckResult criterion_m_l_smoothness() {
  const double ml = phase_constants(1).m_L, h = 1e-5;
  const double v = annealed_gauss(ml, 1).value.value();
  const double slope = (annealed_gauss(ml + h, 1).value.value() - annealed_gauss(ml - h, 1).value.value()) / (2 * h);
  const double target = 0.5 * (std::log(2.0) - 0.625);
  return detail::make("value and slope at m_L", std::abs(v - target) <= 1e-9 && std::abs(slope + 0.5) <= 1e-5,
                      "value " + io::fmt(v) + " (target " + io::fmt(target) + "), slope " + io::fmt(slope));
}

inline CheckResult criterion_ie() {
  double worst = 0;
  for (int k = 0; k <= 400; ++k) {
    const double psi = 2 + 4.0 * k / 400.0;
    worst = std::max(worst, std::abs(ie(psi).value() - oracle::ie_quadrature(psi)));
  }
  return detail::make("I_e closed form vs quadrature", worst <= 1e-8, "max diff " + detail::num(worst));
}

inline CheckResult criterion_ordering() {
  const double lo = haar_m_minus(2, -2, 1), hi = haar_m_plus(2, 1);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const double m = lo + (hi - lo) * (k + 0.5) / 100.0;
    const double ag = annealed_gauss(m, 1).value.value();
    const double ah = detail::to_d(annealed_haar(m, 1));
    const double qg = quenched_gauss_semicircle(m, 1).value.value();
    const double qh = detail::to_d(quenched_haar_semicircle(m, 1).value);
    worst = std::min({worst, std::min(ah, qg) - ag, qh - std::max(ah, qg)});
  }
  return detail::make("ordering chain of the four rates", worst >= -1e-8, "min slack " + detail::num(worst));
}

inline CheckResult criterion_mc_concentration(unsigned workers = 0) {
  ExperimentConfig c;
  c.mode = ExperimentMode::annealed_goe;
  c.field = FieldKind::gauss;
  c.gamma = 1;
  c.n_list = {500};
  c.samples_per_n = 200;
  c.m_grid = {std::sqrt(2.0)};
  c.seed = {20240611, 0};
  c.workers = workers;
  const double goe = run_experiment(c).mean_f.front().second;
  c.mode = ExperimentMode::annealed_wigner;
  c.diag = DistributionSpec::parse("rademacher");
  c.offdiag = DistributionSpec::parse("rademacher");
  const double wig = run_experiment(c).mean_f.front().second;
  const double target = std::sqrt(2.0);
  return detail::make("Monte Carlo concentration at m_bar, n=500",
                      std::abs(goe - target) <= 0.05 && std::abs(wig - target) <= 0.05,
                      "GOE mean F " + io::fmt(goe) + ", Rademacher mean F " + io::fmt(wig));
}

inline CheckResult criterion_rate_slope(unsigned workers = 0) {
  ExperimentConfig c;
  c.mode = ExperimentMode::quenched_fixed_spectrum;
  c.field = FieldKind::gauss;
  c.gamma = 1;
  c.n_list = {10, 20, 40};
  c.samples_per_n = 1'000'000;
  c.m_grid = {1.8};
  c.seed = {20240612, 0};
  c.workers = workers;
  const auto r = run_experiment(c);
  const double ref = quenched_gauss_semicircle(1.8, 1).value.value();
  std::map<std::size_t, double> rate;
  std::string msg;
  for (auto& e : r.estimates)
    if (e.convention == Convention::tail) {
      rate[e.n] = detail::to_d(e.rate_hat);
      msg += "n=" + std::to_string(e.n) + ": " + detail::num(rate[e.n]) + " [count " + std::to_string(e.count) + "]; ";
    }
  const double d10 = std::abs(rate[10] - ref), d40 = std::abs(rate[40] - ref);
  msg += "closed form " + detail::num(ref) + ", rel err at n=40 " + detail::num(d40 / ref);
  return detail::make("tail rate slope approaches the closed form", d40 <= 0.3 * ref && d40 < d10, msg);
}

inline CheckResult criterion_chi_square(unsigned workers = 0) {
  const std::array<double, 2> mu{0.5, 0.5};
  const auto bins = chi_square_block_check(mu, 200, 10'000'000, {31337, 0}, 0.05, workers);
  const double pred = 0.25 * std::log(4.0 / 3.0);
  for (auto& b : bins)
    if (std::abs(b.center[0] - 0.75) < 1e-9) {
      const double emp = detail::to_d(b.empirical_rate);
      return detail::make("block chi-square rate at (3/4, 1/4)", std::abs(emp - pred) <= 0.25 * pred,
                          "empirical " + detail::num(emp) + " (count " + std::to_string(b.count) + "), predicted " +
                              detail::num(pred));
    }
  return detail::make("block chi-square rate at (3/4, 1/4)", false, "bin missing");
}

inline CheckResult criterion_properties() {
  auto parts = property_checks();
  std::size_t passed = 0;
  for (auto& p : parts) passed += p.pass;
  CheckResult r = detail::make("property suites", passed == parts.size(),
                               std::to_string(passed) + "/" + std::to_string(parts.size()) + " property checks pass");
  r.parts = std::move(parts);
  return r;
}

inline const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> list = {
      {1, "phase constants", false, criterion_phase_constants},
      {2, "FLD agreement", false, criterion_fld},
      {3, "closed form vs variational", false, criterion_closed_vs_variational},
      {4, "variational vs oracle", false, criterion_oracle},
      {5, "secular solver", false, criterion_secular},
      {6, "annealed equals quenched below m_U", false, criterion_annealed_equals_quenched},
      {7, "m_L smoothness", false, criterion_m_l_smoothness},
      {8, "I_e quadrature", false, criterion_ie},
      {9, "ordering chain", false, criterion_ordering},
      {10, "Monte Carlo concentration", true, [] { return criterion_mc_concentration(); }},
      {11, "rate-slope trend", true, [] { return criterion_rate_slope(); }},
      {12, "chi-square block check", true, [] { return criterion_chi_square(); }},
      {13, "property suites", false, criterion_properties},
  };
  return list;
}

inline CheckResult run_criterion(const Criterion& c) {
  auto r = detail::guarded(c.name, c.run);
  r.name = c.name;
  return r;
}

}  // namespace sphereldp::checks
