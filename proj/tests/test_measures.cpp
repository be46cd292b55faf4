#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <sphereldp/checks.hpp>
#include <sphereldp/measures.hpp>
#include <sphereldp/oracles.hpp>

using namespace sphereldp;

TEST(DiscreteMeasure, MergesEqualAtomsAndSorts) {
  DiscreteMeasure nu({1.0, -1.0, 1.0}, {0.25, 0.5, 0.25});
  ASSERT_EQ(nu.size(), 2u);
  EXPECT_EQ(nu.atom(0), -1.0);
  EXPECT_EQ(nu.weight(1), 0.5);
  EXPECT_TRUE(nu.is_probability());
}

TEST(DiscreteMeasure, RejectsNegativeWeights) {
  EXPECT_THROW(DiscreteMeasure({0.0}, {-1.0}), std::invalid_argument);
  EXPECT_THROW(DiscreteMeasure({0.0, 1.0}, {1.0}), std::invalid_argument);
}

TEST(RelativeEntropy, IdentityIsZero) {
  DiscreteMeasure q({-1.0, 0.0, 2.0}, {0.2, 0.5, 0.3});
  EXPECT_EQ(relative_entropy(q, q), Extended(0.0));
}

TEST(RelativeEntropy, DoubledMeasure) {
  DiscreteMeasure q({-1.0, 0.0, 2.0}, {0.2, 0.5, 0.3});
  EXPECT_NEAR(relative_entropy(q, q.scaled(2)).value(), 1 - std::log(2.0), 1e-15);
  EXPECT_NEAR(relative_entropy(q, q.scaled(2)).value(), 0.306853, 1e-6);
}

TEST(RelativeEntropy, DisjointSupportIsInfinite) {
  EXPECT_TRUE(relative_entropy(DiscreteMeasure::dirac(0), DiscreteMeasure::dirac(1)).is_infinite());
}

TEST(RelativeEntropy, ExtraAtomsOnlyAddMass) {
  DiscreteMeasure q({0.0}, {1.0}), nu({0.0, 5.0}, {1.0, 0.5});
  EXPECT_NEAR(relative_entropy(q, nu).value(), 0.5, 1e-15);
}

TEST(RelativeEntropy, RejectsNonProbability) {
  EXPECT_THROW(relative_entropy(DiscreteMeasure::dirac(0, 2), DiscreteMeasure::dirac(0)), std::invalid_argument);
}

TEST(J1, Values) {
  EXPECT_EQ(sphereldp::j1(1), Extended(0.0));
  EXPECT_NEAR(sphereldp::j1(2).value(), 0.153426, 1e-6);
  EXPECT_TRUE(sphereldp::j1(0).is_infinite());
  EXPECT_THROW(sphereldp::j1(-1), std::invalid_argument);
}

TEST(JAlpha, Values) {
  EXPECT_EQ(j_alpha(1, 1), Extended(0.0));
  EXPECT_EQ(j_alpha(3, 0), Extended(1.5));
  for (double y : {0.3, 1.0, 4.0}) EXPECT_NEAR(j_alpha(y, 1).value(), sphereldp::j1(y).value(), 1e-15);
  EXPECT_THROW(j_alpha(1, 1.5), std::invalid_argument);
}

TEST(Stieltjes, Values) {
  EXPECT_DOUBLE_EQ(stieltjes_discrete(DiscreteMeasure::dirac(0), 2), 0.5);
  DiscreteMeasure nu({-1.0, 1.0}, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(stieltjes_discrete(nu, 3), 0.375);
  EXPECT_THROW(stieltjes_discrete(nu, 1), std::invalid_argument);
}

TEST(LogPotential, Values) {
  auto nu = DiscreteMeasure::dirac(0);
  EXPECT_EQ(logpot_diff_discrete(nu, 2, 2), 0.0);
  EXPECT_NEAR(logpot_diff_discrete(nu, 1, std::exp(1.0)), 1.0, 1e-15);
  DiscreteMeasure two({-1.0, 1.0}, {0.3, 0.7});
  EXPECT_NEAR(logpot_diff_discrete(two, 1.5, 4), -logpot_diff_discrete(two, 4, 1.5), 1e-15);
}

TEST(LogPotential, MatchesQuadratureBelowSupport) {
  DiscreteMeasure nu({-1.0, 0.5, 1.0}, {0.3, 0.3, 0.4});
  const double quad = oracle::integrate([&](double x) { return stieltjes_discrete(nu, x); }, -4.0, -2.0);
  EXPECT_NEAR(logpot_diff_discrete(nu, -4, -2), quad, 1e-10);
}

TEST(MeasureCsv, RoundTrip) {
  DiscreteMeasure nu({-0.1, 0.7}, {0.1, 0.9});
  std::stringstream ss;
  write_measure_csv(ss, nu);
  auto back = read_measure_csv(ss);
  EXPECT_EQ(back.atoms(), nu.atoms());
  EXPECT_EQ(back.weights(), nu.weights());
}

TEST(MeasureCsv, ReportsLine) {
  std::stringstream ss("atom,weight\n0,1\nx,2\n");
  try {
    read_measure_csv(ss, "m.csv");
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line, 3u);
  }
}

TEST(MeasureProperties, AllHold) {
  for (const auto& r : checks::measures_properties()) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
}
