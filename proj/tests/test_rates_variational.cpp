#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <sphereldp/checks.hpp>
#include <sphereldp/rates_closed.hpp>
#include <sphereldp/rates_variational.hpp>
#include <sphereldp/semicircle.hpp>

using namespace sphereldp;

namespace {
DiscreteMeasure random_q(std::mt19937_64& rng, std::size_t k) {
  return checks::detail::random_probability(rng, k, -1, 1.5);
}
}  // namespace

TEST(QuenchedGaussGeneral, ZeroAtMbar) {
  std::mt19937_64 rng(1);
  auto q = random_q(rng, 20);
  const double mb = mbar(q, q.highest(), 1.3);
  auto r = quenched_gauss_general(q, q.lowest(), q.highest(), 1.3, mb);
  EXPECT_EQ(r.value, Extended(0.0));
  EXPECT_EQ(r.state.b, 1);
  EXPECT_EQ(r.state.theta, r.state.psi);
  EXPECT_EQ(r.state.t, 0);
}

TEST(QuenchedGaussGeneral, SemicircleDiscretization) {
  const auto q = semicircle_discretization(2000);
  for (double m : {1.1, 1.5, 2.0})
    EXPECT_NEAR(quenched_gauss_general(q, -2, 2, 1, m).value.value(), quenched_gauss_semicircle(m, 1).value.value(), 2e-3);
}

TEST(QuenchedGaussGeneral, LowerEdgeIrrelevant) {
  std::mt19937_64 rng(2);
  auto q = random_q(rng, 30);
  for (double m : {0.9, 1.8})
    EXPECT_NEAR(quenched_gauss_general(q, q.lowest(), q.highest(), 1, m).value.to_double(),
                quenched_gauss_general(q, q.lowest() - 3, q.highest(), 1, m).value.to_double(), 1e-12);
}

TEST(QuenchedGaussGeneral, RejectsBadInput) {
  EXPECT_THROW(quenched_gauss_general(DiscreteMeasure::dirac(0, 2), -1, 1, 1, 1), std::invalid_argument);
  EXPECT_THROW(quenched_gauss_general(DiscreteMeasure::dirac(2), -1, 1, 1, 1), std::invalid_argument);
}

TEST(QuenchedHaarGeneral, BelowGaussAndBlowsUpAtWindowEdge) {
  std::mt19937_64 rng(3);
  auto q = random_q(rng, 30);
  const double g = 0.8, lp = q.highest(), lm = q.lowest();
  const double hi = haar_m_plus(lp, g), mb = mbar(q, lp, g);
  Extended prev(0.0);
  for (int k = 1; k <= 8; ++k) {
    const double m = mb + (hi - mb) * (1 - std::pow(0.5, k));
    const auto h = quenched_haar_general(q, lm, lp, g, m).value;
    EXPECT_LE(quenched_gauss_general(q, lm, lp, g, m).value.value(), h.value() + 1e-12);
    EXPECT_GT(h.value(), prev.value());
    prev = h;
  }
  EXPECT_TRUE(quenched_haar_general(q, lm, lp, g, hi + 1e-3).value.is_infinite());
  EXPECT_EQ(quenched_haar_general(q, lm, lp, g, mb).value, Extended(0.0));
}

TEST(QuenchedHaarGeneral, EdgesMustMatchSupport) {
  std::mt19937_64 rng(4);
  auto q = random_q(rng, 10);
  EXPECT_THROW(quenched_haar_general(q, q.lowest(), q.highest() + 0.1, 1, 1), std::invalid_argument);
}

TEST(ShiftedEdge, ConsistencyAndMonotonicity) {
  std::mt19937_64 rng(5);
  auto q = random_q(rng, 30);
  const double g = 1, mb = mbar(q, q.highest(), g);
  EXPECT_EQ(quenched_haar_shifted_edge(q, q.highest(), q.lowest(), g, mb + 0.2),
            quenched_haar_general(q, q.lowest(), q.highest(), g, mb + 0.2).value);
  Extended prev = Extended::infinity();
  for (int k = 0; k < 8; ++k) {
    auto v = quenched_haar_shifted_edge(q, q.highest() + 0.1 * k, q.lowest(), g, mb + 0.2);
    EXPECT_FALSE(prev < v);
    prev = v;
  }
}

TEST(DirectOracle, AgreesWithProfileSolver) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 5; ++t) {
    auto q = random_q(rng, 50);
    const double g = 0.3 + 2 * u(rng), lp = q.highest(), lm = q.lowest(), mb = mbar(q, lp, g);
    for (double m : {0.5 * lp + 0.5 * (mb - 0.5 * lp), mb + 0.4}) {
      EXPECT_NEAR(quenched_gauss_general(q, lm, lp, g, m).value.value(),
                  direct_minimize_oracle(q, lp, lp, g, m, Flavor::gauss).value(), 1e-6);
    }
    const double lo = haar_m_minus(lp, lm, g), hi = haar_m_plus(lp, g);
    for (double f : {0.2, 0.8}) {
      const double m = lo + (hi - lo) * f;
      EXPECT_NEAR(quenched_haar_general(q, lm, lp, g, m).value.value(),
                  direct_minimize_oracle(q, lp, m > mb ? lp : lm, g, m, Flavor::haar).value(), 1e-6);
    }
  }
  auto q = random_q(rng, 10);
  EXPECT_EQ(direct_minimize_oracle(q, q.highest(), q.highest(), 1, mbar(q, q.highest(), 1), Flavor::gauss), Extended(0.0));
}

TEST(AnnealedGeneral, MatchesClosedForm) {
  for (double m : {1.2, 1.5, 2.0, 2.5})
    EXPECT_NEAR(annealed_general_gauss(m, 1).value(), annealed_gauss(m, 1).value.value(), 2e-3);
}

TEST(VariationalProperties, AllHold) {
  for (const auto& r : checks::rates_variational_properties()) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
}
