#include <array>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include <sphereldp/checks.hpp>
#include <sphereldp/mc.hpp>

using namespace sphereldp;

namespace {
ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n_list = {6, 12};
  c.samples_per_n = 2000;
  c.m_grid = {1.2, 1.5};
  c.seed = {11, 0};
  return c;
}
}  // namespace

TEST(ConfigParse, ReadsAllKeys) {
  std::stringstream in(
      "# comment\nmode = annealed-wigner\nfield = haar\ngamma = 2\nn_list = 5, 10\nsamples_per_n = 30\n"
      "delta = 0.1\nm_grid = 1:1.2:0.1\nseed = 9\nstream = 4\ndiag = rademacher\noffdiag = uniform\n"
      "workers = 3\neigen_method = jacobi\njacobi_tolerance = 1e-13\n");
  auto c = parse_experiment_config(in);
  EXPECT_EQ(c.mode, ExperimentMode::annealed_wigner);
  EXPECT_EQ(c.field, FieldKind::haar);
  EXPECT_EQ(c.n_list, (std::vector<std::size_t>{5, 10}));
  ASSERT_EQ(c.m_grid.size(), 3u);
  EXPECT_NEAR(c.m_grid[2], 1.2, 1e-15);
  EXPECT_EQ(c.seed.stream, 4u);
  EXPECT_EQ(c.diag.kind, DistributionSpec::Kind::rademacher);
  EXPECT_EQ(c.eigen.method, EigenMethod::jacobi);
  EXPECT_EQ(c.workers, 3u);
}

TEST(ConfigParse, ErrorsCarryLineNumbers) {
  std::stringstream in("gamma = 1\nbogus = 3\n");
  try {
    parse_experiment_config(in, "cfg");
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line, 2u);
  }
}

TEST(ConfigValidate, RejectsDegenerateConfigs) {
  auto c = small_config();
  c.samples_per_n = 0;
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
  c = small_config();
  c.m_grid.clear();
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
  c = small_config();
  c.delta = 0;
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
}

TEST(Wilson, KnownInterval) {
  auto w = wilson_interval(5, 100);
  EXPECT_NEAR(w.low, 0.021543, 1e-5);
  EXPECT_NEAR(w.high, 0.111751, 1e-5);
  EXPECT_EQ(wilson_interval(0, 10).low, 0);
}

TEST(Experiment, WorkerCountDoesNotChangeTables) {
  auto c = small_config();
  std::ostringstream a, b;
  c.workers = 1;
  write_results_csv(a, run_experiment(c));
  c.workers = 4;
  write_results_csv(b, run_experiment(c));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Experiment, QuenchedMeanNearMbar) {
  auto c = small_config();
  c.n_list = {40};
  c.samples_per_n = 100000;
  c.workers = 0;
  const auto r = run_experiment(c);
  EXPECT_NEAR(r.mean_f.front().second, std::sqrt(2.0), 0.02);
}

TEST(Experiment, CsvHeaderAndReference) {
  auto c = small_config();
  const auto r = run_experiment(c, true);
  std::ostringstream os, js;
  write_results_csv(os, r);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), kResultsHeader);
  EXPECT_EQ(r.samples.size(), 4000u);
  for (const auto& e : r.estimates) ASSERT_TRUE(e.reference_rate);
  const auto j = results_json(r);
  EXPECT_EQ(j["rows"].size(), r.estimates.size());
}

TEST(Experiment, WideWindowGivesZeroRate) {
  auto c = small_config();
  c.delta = 50;
  for (const auto& e : run_experiment(c).estimates)
    if (e.convention == Convention::window) {
      EXPECT_EQ(e.rate_hat, Extended(0.0));
    }
}

TEST(Experiment, SpectrumFileLengthChecked) {
  auto c = small_config();
  c.spectrum = "file";
  c.spectrum_file = "/nonexistent/spectrum.txt";
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
}

TEST(ChiSquareBlocks, PredictedRates) {
  const std::array<double, 2> mu{0.5, 0.5}, x{0.5, 0.5}, y{0.75, 0.25};
  EXPECT_EQ(chi_square_block_rate(mu, x), Extended(0.0));
  EXPECT_NEAR(chi_square_block_rate(mu, y).value(), 0.25 * std::log(4.0 / 3.0), 1e-15);
}

TEST(ChiSquareBlocks, SizesAndValidation) {
  const std::array<double, 3> f{0.2, 0.3, 0.5};
  EXPECT_EQ(block_sizes(f, 10), (std::vector<std::size_t>{2, 3, 5}));
  const std::array<double, 2> bad{0.5, 0.6};
  EXPECT_THROW(block_sizes(bad, 10), std::invalid_argument);
}

TEST(ChiSquareBlocks, DeterministicAcrossWorkers) {
  const std::array<double, 2> mu{0.5, 0.5};
  auto a = chi_square_block_check(mu, 40, 20000, {1, 0}, 0.05, 1);
  auto b = chi_square_block_check(mu, 40, 20000, {1, 0}, 0.05, 3);
  ASSERT_EQ(a.size(), b.size());
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].count, b[i].count);
    total += a[i].count;
  }
  EXPECT_EQ(total, 20000u);
}

TEST(McProperties, AllHold) {
  for (const auto& r : checks::mc_properties()) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
}
