#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include <sphereldp/checks.hpp>
#include <sphereldp/ensembles.hpp>
#include <sphereldp/semicircle.hpp>

using namespace sphereldp;

TEST(Philox, KnownAnswers) {
  using B = Philox4x32::block_type;
  EXPECT_EQ(Philox4x32::generate(B{0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterRng, AddressableAndInUnitInterval) {
  CounterRng a({1, 2}), b({1, 2});
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    EXPECT_GT(u, 0);
    EXPECT_LT(u, 1);
  }
  EXPECT_EQ(b.uniform_at(7), CounterRng({1, 2}).uniform_at(7));
}

TEST(SampleGoe, EntryMoments) {
  const int draws = 100000;
  double s12 = 0, s11 = 0, s11sq = 0;
  for (int k = 0; k < draws; ++k) {
    auto w = sample_goe(4, {42, static_cast<std::uint64_t>(k)});
    s12 += w(0, 1);
    s11 += w(0, 0);
    s11sq += w(0, 0) * w(0, 0);
  }
  const double se12 = std::sqrt(0.25 / draws);
  EXPECT_LT(std::abs(s12 / draws), 4 * se12);
  const double var = s11sq / draws - (s11 / draws) * (s11 / draws);
  EXPECT_NEAR(var, 0.5, 0.025);
}

TEST(SampleGoe, EdgeEigenvalue) {
  const auto e = spectrum(sample_goe(1000, {5, 0}));
  EXPECT_GT(e.values.top(), 1.9);
  EXPECT_LT(e.values.top(), 2.1);
}

TEST(SampleWigner, RademacherSemicircleKolmogorov) {
  const auto w = sample_wigner(500, DistributionSpec::parse("rademacher"), DistributionSpec::parse("rademacher"), {9, 1});
  auto v = spectrum(w).values.values();
  std::sort(v.begin(), v.end());
  double ks = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = semicircle_cdf(v[i]);
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / 500.0), std::abs(f - static_cast<double>(i + 1) / 500.0)});
  }
  EXPECT_LE(ks, 0.05);
}

TEST(SampleWigner, GaussianSpecMatchesGoe) {
  const auto a = sample_wigner(20, DistributionSpec::parse("gaussian:2"), DistributionSpec::parse("gaussian"), {3, 4});
  EXPECT_EQ(a.packed(), sample_goe(20, {3, 4}).packed());
  EXPECT_EQ(sample_goe(1, {3, 4}).order(), 1u);
  EXPECT_THROW(sample_wigner(3, DistributionSpec::parse("gaussian"), DistributionSpec::parse("gaussian:2"), {1, 1}),
               std::invalid_argument);
}

TEST(HaarField, NormAndMoments) {
  auto h = sample_haar_sphere(37, 2.5, {1, 1});
  double n2 = 0;
  for (double x : h) n2 += x * x;
  EXPECT_NEAR(n2, 2.5, 1e-13);
  double s = 0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    auto v = sample_haar_sphere(10, 3, {2, static_cast<std::uint64_t>(k)});
    s += v[0] * v[0];
  }
  EXPECT_NEAR(s / draws, 0.3, 0.015);
  auto one = sample_haar_sphere(1, 4, {0, 0});
  EXPECT_NEAR(std::abs(one[0]), 2, 1e-15);
}

TEST(GaussField, NormMean) {
  double s = 0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    auto v = sample_gauss_field(10, 2, {3, static_cast<std::uint64_t>(k)});
    for (double x : v) s += x * x;
  }
  EXPECT_NEAR(s / draws, 2, 0.04);
}

TEST(GaussField, ChiSquareTailSlope) {
  // Empirical tail of |g|^2/gamma >= 2 at n = 40 against the exact chi-square tail.
  const std::size_t n = 40;
  const int draws = 400000;
  int hits = 0;
  for (int k = 0; k < draws; ++k) {
    auto v = sample_gauss_field(n, 1.5, {4, static_cast<std::uint64_t>(k)});
    double s = 0;
    for (double x : v) s += x * x;
    hits += s / 1.5 >= 2;
  }
  ASSERT_GT(hits, 0);
  const double emp = -std::log(static_cast<double>(hits) / draws) / n;
  const double exact = -std::log(boost::math::gamma_q(n / 2.0, n / 1.0)) / n;
  EXPECT_NEAR(emp, exact, 0.25 * exact);
  EXPECT_GT(emp, sphereldp::j1(2).value());
}

TEST(Spectrum, SmallCases) {
  SymmetricMatrix d(3);
  d.set(0, 0, -1);
  d.set(1, 1, 4);
  d.set(2, 2, 0.5);
  for (EigenMethod m : {EigenMethod::jacobi, EigenMethod::tridiagonal}) {
    EigenOptions o;
    o.method = m;
    auto e = spectrum(d, o);
    EXPECT_EQ(e.values.values(), (std::vector<double>{4, 0.5, -1}));
    EXPECT_NEAR(std::abs(e.vec(0, 1)), 1, 1e-15);
    SymmetricMatrix x(2);
    x.set(0, 1, 1);
    auto ex = spectrum(x, o);
    EXPECT_NEAR(ex.values[0], 1, 1e-15);
    EXPECT_NEAR(ex.values[1], -1, 1e-15);
  }
}

TEST(Spectrum, JacobiAgreesWithTridiagonal) {
  const auto w = sample_goe(60, {8, 8});
  EigenOptions a, b;
  a.method = EigenMethod::jacobi;
  b.method = EigenMethod::tridiagonal;
  const auto ea = spectrum(w, a), eb = spectrum(w, b);
  for (std::size_t i = 0; i < 60; ++i) EXPECT_NEAR(ea.values[i], eb.values[i], 1e-12);
}

TEST(FValue, Values) {
  SymmetricMatrix zero(3);
  std::vector<double> h{0.3, -0.4, 1.2};
  EXPECT_NEAR(f_value(zero, h), 1.3, 1e-12);
  const auto w = sample_goe(6, {1, 0});
  EXPECT_NEAR(f_value(w, std::vector<double>(6, 0.0)), 0.5 * spectrum(w).values.top(), 1e-14);
  EXPECT_THROW(f_value(w, std::vector<double>(5, 0.0)), std::invalid_argument);
}

TEST(MatrixIo, RoundTrip) {
  const auto w = sample_goe(5, {2, 2});
  std::stringstream ss;
  write_matrix(ss, w);
  EXPECT_EQ(read_matrix(ss).packed(), w.packed());
  std::stringstream bad("2\n1 2\n");
  EXPECT_THROW(read_matrix(bad), parse_error);
}

TEST(EnsembleProperties, AllHold) {
  for (const auto& r : checks::ensembles_properties()) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
}
