#include <cmath>

#include <gtest/gtest.h>

#include <sphereldp/checks.hpp>
#include <sphereldp/oracles.hpp>
#include <sphereldp/rates_closed.hpp>

using namespace sphereldp;

TEST(PhaseConstants, GammaOne) {
  auto c = phase_constants(1);
  EXPECT_EQ(c.m_L, 1.25);
  EXPECT_EQ(c.m_U, 1.75);
  EXPECT_NEAR(c.m_bar, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(c.m_c, std::sqrt(1.5), 1e-15);
}

TEST(PhaseConstants, GammaTen) {
  auto c = phase_constants(10);
  EXPECT_NEAR(c.m_c, 1.382, 1e-3);
  EXPECT_NEAR(c.m_L, 1.454, 1e-3);
  EXPECT_THROW(phase_constants(0), std::invalid_argument);
}

TEST(Ie, Values) {
  EXPECT_EQ(ie(2), Extended(0.0));
  EXPECT_TRUE(ie(1.9).is_infinite());
  EXPECT_NEAR(ie(2.5).value(), 15.0 / 16 - std::log(2.0), 1e-15);
  EXPECT_NEAR(ie(2.5).value(), oracle::ie_quadrature(2.5), 1e-10);
  EXPECT_NEAR(ie(2 + 1e-6).value(), oracle::ie_quadrature(2 + 1e-6), 1e-15);
}

TEST(ScriptI, Values) {
  for (double a : {0.3, 1.0, 2.0}) EXPECT_NEAR(script_i(a, a), 0, 1e-16);
  EXPECT_NEAR(script_i(1, 5), 0.5 * (0.2 - 1 - std::log(0.2)) - 0.16, 1e-15);
  EXPECT_NEAR(script_i(1, 5), 0.244719, 1e-6);
  for (double m : {1.1, 2.0}) EXPECT_EQ(frak_t(1, m, 3), 0.0);
}

TEST(QuenchedGauss, Values) {
  for (double g : {0.5, 1.0, 10.0}) {
    const double mb = std::sqrt(1 + g);
    auto p = quenched_gauss_semicircle(mb, g);
    EXPECT_NEAR(p.value.value(), 0, 1e-12);
    EXPECT_NEAR(p.alpha, p.beta, 1e-7);
  }
  auto p = quenched_gauss_semicircle(1.1, 1);
  EXPECT_EQ(p.phase, Phase::I);
  EXPECT_EQ(p.alpha, 1);
  EXPECT_NEAR(p.beta, 5, 1e-12);
  EXPECT_NEAR(p.value.value(), 0.244719, 1e-6);
  const double eta = 0.5;
  EXPECT_NEAR(quenched_gauss_semicircle(1.25, 1).value.value(), 0.5 * (-std::log(1 - eta) - eta - 0.5 * eta * eta), 1e-12);
  EXPECT_TRUE(quenched_gauss_semicircle(1, 1).value.is_infinite());
  EXPECT_EQ(quenched_gauss_semicircle(2, 1).phase, Phase::III);
}

TEST(AnnealedGauss, Values) {
  auto c = phase_constants(1);
  for (int k = 0; k < 50; ++k) {
    const double m = 1.01 + (c.m_U - 1.01) * k / 49.0;
    EXPECT_EQ(annealed_gauss(m, 1).value, quenched_gauss_semicircle(m, 1).value);
  }
  EXPECT_NEAR(annealed_gauss(std::sqrt(2.0), 1).value.value(), 0, 1e-12);
  auto p = annealed_gauss(2.5, 1);
  EXPECT_EQ(p.phase, Phase::annealed_tail);
  EXPECT_NEAR(c.m_c * c.m_c * p.alpha * p.alpha - 5 * p.alpha + 1, 0, 1e-10);
  EXPECT_LT(p.value.value(), quenched_gauss_semicircle(2.5, 1).value.value());
}

TEST(FldRate, Values) {
  for (double g : {1.0, 10.0}) {
    auto c = phase_constants(g);
    EXPECT_NEAR(fld_rate(c.m_bar, g).value(), 0, 1e-12);
    for (double m = c.m_L; m < 3; m += 0.05) EXPECT_NEAR(fld_rate(m, g).value(), annealed_gauss(m, g).value.value(), 1e-9);
  }
  auto c = phase_constants(10);
  for (double m = c.m_c + 1e-3; m < c.m_L - 1e-3; m += 0.005)
    EXPECT_GT(fld_rate(m, 10).value(), annealed_gauss(m, 10).value.value());
  EXPECT_TRUE(fld_rate(1.0, 10).is_infinite());
}

TEST(HaarSemicircle, ZeroAndOrdering) {
  EXPECT_EQ(quenched_haar_semicircle(std::sqrt(2.0), 1).value, Extended(0.0));
  EXPECT_NEAR(annealed_haar(std::sqrt(2.0), 1).value(), 0, 1e-9);
  for (double m : {1.2, 1.35, 1.6, 1.9}) {
    const double ag = annealed_gauss(m, 1).value.value(), ah = annealed_haar(m, 1).value();
    const double qg = quenched_gauss_semicircle(m, 1).value.value(), qh = quenched_haar_semicircle(m, 1).value.value();
    EXPECT_LE(ag, std::min(ah, qg) + 1e-8);
    EXPECT_LE(std::max(ah, qg), qh + 1e-8);
  }
}

TEST(HaarSemicircle, AnnealedFiniteOutsideQuenchedWindow) {
  // Quenched window at gamma = 1 is (1.125, 2).
  EXPECT_TRUE(quenched_haar_semicircle(2.5, 1).value.is_infinite());
  EXPECT_TRUE(quenched_haar_semicircle(1.1, 1).value.is_infinite());
  EXPECT_TRUE(annealed_haar(2.5, 1).finite());
  EXPECT_TRUE(annealed_haar(1.1, 1).finite());
}

TEST(ClosedFormProperties, AllHold) {
  for (const auto& r : checks::rates_closed_properties()) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
}
