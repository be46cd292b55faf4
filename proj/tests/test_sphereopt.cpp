#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <sphereldp/checks.hpp>
#include <sphereldp/oracles.hpp>
#include <sphereldp/semicircle.hpp>
#include <sphereldp/sphereopt.hpp>

using namespace sphereldp;

TEST(SolveSecular, ZeroField) {
  auto s = solve_secular(OrderedSpectrum({3.0, 1.0, -2.0}), std::vector<double>{0, 0, 0});
  EXPECT_DOUBLE_EQ(s.f_star, 1.5);
  EXPECT_TRUE(s.boundary);
  EXPECT_FALSE(s.optimizer);
}

TEST(SolveSecular, TwoByTwo) {
  auto s = solve_secular(OrderedSpectrum({1.0, -1.0}), std::vector<double>{1, 0});
  EXPECT_NEAR(s.theta_star, 2, 1e-13);
  EXPECT_NEAR(s.f_star, 1.5, 1e-13);
  ASSERT_TRUE(s.optimizer);
  EXPECT_NEAR((*s.optimizer)[0], 1, 1e-13);
  EXPECT_NEAR((*s.optimizer)[1], 0, 1e-13);
}

TEST(SolveSecular, TopComponentZeroBoundary) {
  // h on the top block vanishes and the remaining field is weak: boundary value.
  auto s = solve_secular(OrderedSpectrum({1.0, -1.0}), std::vector<double>{0, 0.5});
  EXPECT_TRUE(s.boundary);
  EXPECT_NEAR(s.f_star, 0.5 * (1 + 0.25 / 2), 1e-15);
}

TEST(SolveSecular, TopComponentZeroInterior) {
  auto s = solve_secular(OrderedSpectrum({1.0, -1.0}), std::vector<double>{0, 3});
  EXPECT_FALSE(s.boundary);
  EXPECT_NEAR(s.theta_star, 2, 1e-12);
  EXPECT_NEAR(s.f_star, 0.5 * (2 + 9.0 / 3), 1e-12);
}

TEST(SolveSecular, MatchesSphereGridOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 10; ++t) {
    std::array<double, 3> l{u(rng), u(rng), u(rng)}, h{u(rng), u(rng), u(rng)};
    std::sort(l.begin(), l.end(), std::greater<>());
    const double f = solve_secular(OrderedSpectrum({l[0], l[1], l[2]}), std::vector<double>(h.begin(), h.end())).f_star;
    EXPECT_NEAR(f, oracle::sphere_grid_max(l, h, 200'000), 1e-3);
  }
}

TEST(SolveSecular, RejectsMismatchedLength) {
  EXPECT_THROW(solve_secular(OrderedSpectrum({1.0, 0.0}), std::vector<double>{1}), std::invalid_argument);
}

TEST(OrderedSpectrum, RejectsAscending) {
  EXPECT_THROW(OrderedSpectrum({0.0, 1.0}), std::invalid_argument);
}

TEST(BigF, Values) {
  EXPECT_NEAR(big_f(1.5, DiscreteMeasure::dirac(1.5), 2), 0.75 + std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(big_f(1.5, DiscreteMeasure(), 2), 0.75);
  const double lp = 1, lm = -2, g = 4;
  const double th = std::max(lp, lm + std::sqrt(g));
  EXPECT_NEAR(big_f(lp, DiscreteMeasure::dirac(lm), g), 0.5 * (th + g / (th - lm)), 1e-12);
  EXPECT_NEAR(big_f(lp, DiscreteMeasure::dirac(lm), g), haar_m_minus(lp, lm, g), 1e-12);
}

TEST(MBar, Values) {
  EXPECT_NEAR(mbar(semicircle_discretization(2000), 2, 1), std::sqrt(2.0), 2e-3);
  EXPECT_NEAR(mbar(DiscreteMeasure::dirac(0), 0, 1), 1, 1e-12);
  EXPECT_NEAR(mbar(DiscreteMeasure::dirac(0.7), 0.7, 3), 0.35 + std::sqrt(3.0), 1e-12);
}

TEST(ReadInstance, ParsesAndWarns) {
  std::stringstream in("2 1\n-1 0\n1 1\n"), warn;
  auto inst = read_instance(in, "inst.txt", &warn);
  EXPECT_EQ(inst.lambda.top(), 1.0);
  EXPECT_EQ(inst.h[0], 1.0);
  EXPECT_NE(warn.str().find("sorting"), std::string::npos);
}

TEST(ReadInstance, ReportsBadLine) {
  std::stringstream in("2 1\n1 1\n-1 oops\n");
  try {
    read_instance(in, "inst.txt", nullptr);
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line, 3u);
  }
}

TEST(SphereoptProperties, AllHold) {
  for (const auto& r : checks::sphereopt_properties()) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
}
