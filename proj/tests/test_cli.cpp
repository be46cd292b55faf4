#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SPHERELDP_CLI) + " " + args + " 2>/dev/null";
  Run r{0, {}};
  FILE* p = popen(cmd.c_str(), "r");
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    rows.push_back(f);
  }
  return rows;
}

}  // namespace

TEST(Cli, SolveExampleInstance) {
  auto r = run(std::string("solve ") + SPHERELDP_DATA + "/example_n2.txt");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("theta_star 2"), std::string::npos);
  EXPECT_NE(r.out.find("f_star 1.5"), std::string::npos);
}

TEST(Cli, RatesAnnealedBelowQuenched) {
  auto r = run("rates --gamma 1 --from 1.01 --to 3 --step 0.005 --flavors quenched-gauss,annealed-gauss");
  ASSERT_EQ(r.code, 0);
  auto rows = csv(r.out);
  ASSERT_EQ(rows[0][0], "flavor");
  const std::size_t count = (rows.size() - 1) / 2;
  ASSERT_EQ(rows.size(), 2 * count + 1);
  for (std::size_t k = 1; k <= count; ++k) {
    const double m = std::stod(rows[k][1]);
    const double q = std::stod(rows[k][3]), a = std::stod(rows[k + count][3]);
    EXPECT_LE(a, q + 1e-15);
    if (m <= 1.75) {
      EXPECT_EQ(a, q);
    }
  }
}

TEST(Cli, Fig2PositiveColumn) {
  auto r = run("rates --fig2 --gamma 10");
  ASSERT_EQ(r.code, 0);
  auto rows = csv(r.out);
  ASSERT_GT(rows.size(), 100u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double m = std::stod(rows[k][1]);
    EXPECT_GT(m, 1.3816);
    EXPECT_LT(m, 1.4546);
    EXPECT_GT(std::stod(rows[k][3]), 0);
  }
}

TEST(Cli, RatesErrors) {
  EXPECT_EQ(run("rates --flavors ''").code, 1);
  EXPECT_EQ(run("rates --flavors nonsense").code, 1);
  EXPECT_EQ(run("rates --from 2 --to 1").code, 1);
  EXPECT_EQ(run("").code, 1);
}

TEST(Cli, RatesJsonAndDeterministic) {
  const std::string args = "rates --gamma 1 --from 1.1 --to 2.4 --step 0.1";
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto j = run(args + " --format json --flavors fld");
  EXPECT_EQ(j.code, 0);
  EXPECT_EQ(j.out.front(), '[');
}

TEST(Cli, SimulateDeterministic) {
  const std::string cfg = testing::TempDir() + "cli_sim.cfg";
  std::ofstream(cfg) << "mode = quenched-fixed-spectrum\nfield = haar\nn_list = 8\nsamples_per_n = 500\nm_grid = 1.3,1.6\nseed = 3\n";
  auto a = run("simulate --config " + cfg + " --workers 1");
  auto b = run("simulate --config " + cfg + " --workers 3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(run("simulate --config " + cfg + " --samples 0").code, 1);
  EXPECT_EQ(run("simulate --config /nonexistent.cfg").code, 1);
}

TEST(Cli, BadInstanceIsUsageError) {
  const std::string path = testing::TempDir() + "cli_bad.txt";
  std::ofstream(path) << "2 1\n1 1\n";
  EXPECT_EQ(run("solve " + path).code, 1);
}
