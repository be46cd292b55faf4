// sphereldp command-line front end: rate sweeps, single instances, simulations, self-check.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <sphereldp/checks.hpp>
#include <sphereldp/errors.hpp>
#include <sphereldp/io.hpp>
#include <sphereldp/mc.hpp>
#include <sphereldp/rates_closed.hpp>
#include <sphereldp/rates_variational.hpp>
#include <sphereldp/sphereopt.hpp>

namespace {

using namespace sphereldp;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitSelfcheck = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kFlavors = {"quenched-gauss", "annealed-gauss", "quenched-haar", "annealed-haar", "fld"};

struct Row {
  std::string flavor;
  double m = 0;
  std::string phase = "none";
  Extended value = Extended::infinity();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double beta = alpha, theta = alpha, psi = alpha, t = alpha, residual = alpha;
};

Row from_point(const std::string& flavor, const RateCurvePoint& p) {
  return {flavor, p.m, to_string(p.phase), p.value, p.alpha, p.beta, p.theta, p.psi, p.t, std::numeric_limits<double>::quiet_NaN()};
}

Row rate_row(const std::string& flavor, double m, double gamma) {
  if (flavor == "quenched-gauss") return from_point(flavor, quenched_gauss_semicircle(m, gamma));
  if (flavor == "annealed-gauss") return from_point(flavor, annealed_gauss(m, gamma));
  Row r;
  r.flavor = flavor;
  r.m = m;
  if (flavor == "quenched-haar") {
    const auto v = quenched_haar_semicircle(m, gamma);
    r.value = v.value;
    if (v.value.finite()) {
      r.theta = v.state.theta;
      r.psi = v.state.psi;
      r.t = v.state.t;
      const double ps = v.state.pinned_edge == PinnedEdge::minus || m < std::sqrt(1 + gamma) ? -2.0 : 2.0;
      r.residual = lagrange_residuals(SemicircleModel{}, v.state, 2.0, ps, gamma, m, Flavor::haar).max();
    }
  } else if (flavor == "annealed-haar") {
    const auto a = annealed_rate(SemicircleModel{}, m, gamma, Flavor::haar);
    r.value = a.value;
    if (a.value.finite()) r.psi = m < std::sqrt(1 + gamma) ? -a.psi_star : a.psi_star;
  } else {
    r.value = fld_rate(m, gamma);
  }
  return r;
}

void write_rows_csv(std::ostream& os, const std::vector<Row>& rows) {
  os << "flavor,m,phase,value,alpha,beta,theta,psi,t,residual\n";
  for (const auto& r : rows)
    os << r.flavor << ',' << io::fmt(r.m) << ',' << r.phase << ',' << io::fmt(r.value) << ',' << io::fmt(r.alpha)
       << ',' << io::fmt(r.beta) << ',' << io::fmt(r.theta) << ',' << io::fmt(r.psi) << ',' << io::fmt(r.t) << ','
       << io::fmt(r.residual) << '\n';
}

nlohmann::json num_or_null(double x) { return std::isnan(x) ? nlohmann::json() : nlohmann::json(x); }

nlohmann::json rows_json(const std::vector<Row>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"flavor", r.flavor},
                   {"m", r.m},
                   {"phase", r.phase},
                   {"value", r.value.finite() ? nlohmann::json(r.value.value()) : nlohmann::json("inf")},
                   {"alpha", num_or_null(r.alpha)},
                   {"beta", num_or_null(r.beta)},
                   {"theta", num_or_null(r.theta)},
                   {"psi", num_or_null(r.psi)},
                   {"t", num_or_null(r.t)},
                   {"residual", num_or_null(r.residual)}});
  return out;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw UsageError("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

// ---------------------------------------------------------------- rates

struct RatesOptions {
  double gamma = 1;
  double from = 1.01, to = 3, step = 0.005;
  std::vector<std::string> flavors = kFlavors;
  bool fig2 = false;
  std::string output, format = "csv";
};

int cmd_rates(const RatesOptions& o) {
  if (!(o.gamma > 0)) throw UsageError("--gamma must be > 0");
  std::vector<Row> rows;
  if (o.fig2) {
    const auto c = phase_constants(o.gamma);
    const double lo = c.m_c + 1e-3, hi = c.m_L - 1e-3;
    if (!(hi > lo)) throw UsageError("--fig2: empty interval (m_c, m_L)");
    const std::size_t count = 500;
    for (std::size_t k = 0; k < count; ++k) {
      const double m = lo + (hi - lo) * static_cast<double>(k) / (count - 1);
      Row r;
      r.flavor = "fld-minus-annealed-gauss";
      r.m = m;
      r.value = fld_rate(m, o.gamma).value() - annealed_gauss(m, o.gamma).value.value();
      rows.push_back(r);
    }
  } else {
    if (o.flavors.empty()) throw UsageError("empty flavor set");
    for (const auto& f : o.flavors)
      if (std::find(kFlavors.begin(), kFlavors.end(), f) == kFlavors.end()) throw UsageError("unknown flavor '" + f + "'");
    if (!(o.step > 0)) throw UsageError("--step must be > 0");
    if (!(o.from < o.to)) throw UsageError("--from must be < --to");
    const auto count = static_cast<std::size_t>(std::floor((o.to - o.from) / o.step + 1e-9));
    for (const auto& f : o.flavors)
      for (std::size_t k = 0; k <= count; ++k) rows.push_back(rate_row(f, o.from + o.step * static_cast<double>(k), o.gamma));
  }
  Output out(o.output);
  if (o.format == "json")
    out.stream() << rows_json(rows).dump(2) << '\n';
  else
    write_rows_csv(out.stream(), rows);
  return kExitOk;
}

// ---------------------------------------------------------------- solve

int cmd_solve(const std::string& path, const std::string& format) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open instance file " + path);
  const Instance inst = read_instance(in, path, &std::cerr);
  const SecularSolution s = solve_secular(inst.lambda, inst.h);
  if (format == "json") {
    nlohmann::json j = {{"n", inst.h.size()}, {"theta_star", s.theta_star}, {"f_star", s.f_star}, {"boundary", s.boundary}};
    j["optimizer"] = s.optimizer ? nlohmann::json(*s.optimizer) : nlohmann::json();
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }
  std::cout << "n " << inst.h.size() << '\n'
            << "theta_star " << io::fmt(s.theta_star) << '\n'
            << "f_star " << io::fmt(s.f_star) << '\n'
            << "boundary " << (s.boundary ? "true" : "false") << '\n';
  if (s.optimizer) {
    std::cout << "optimizer";
    for (double x : *s.optimizer) std::cout << ' ' << io::fmt(x);
    std::cout << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string config, output, format = "csv", dump_samples;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<double> gamma;
};

int cmd_simulate(const SimulateOptions& o) {
  std::ifstream in(o.config);
  if (!in) throw UsageError("cannot open config file " + o.config);
  ExperimentConfig c = parse_experiment_config(in, o.config);
  if (c.spectrum == "file" && !c.spectrum_file.empty() && std::filesystem::path(c.spectrum_file).is_relative())
    c.spectrum_file = (std::filesystem::path(o.config).parent_path() / c.spectrum_file).string();
  if (o.workers) c.workers = *o.workers;
  if (o.seed) c.seed.seed = *o.seed;
  if (o.samples) c.samples_per_n = *o.samples;
  if (o.gamma) c.gamma = *o.gamma;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const ExperimentResult r = run_experiment(c, !o.dump_samples.empty());
  Output out(o.output);
  if (o.format == "json")
    out.stream() << results_json(r).dump(2) << '\n';
  else
    write_results_csv(out.stream(), r);
  for (auto& [n, v] : r.mean_f) std::cerr << "mean F n=" << n << ": " << io::fmt(v) << '\n';
  if (!o.dump_samples.empty()) {
    std::ofstream dump(o.dump_samples);
    if (!dump) throw UsageError("cannot open sample dump file " + o.dump_samples);
    write_samples_csv(dump, r);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- selfcheck

int cmd_selfcheck(bool skip_slow) {
  bool all = true;
  for (const auto& c : checks::acceptance_criteria()) {
    if (c.slow && skip_slow) {
      std::cout << "SKIP " << c.id << ' ' << c.name << '\n';
      continue;
    }
    const auto r = checks::run_criterion(c);
    all = all && r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << c.id << ' ' << c.name << ": " << r.detail << '\n';
    for (const auto& p : r.parts) std::cout << "  " << (p.pass ? "pass " : "FAIL ") << p.name << ": " << p.detail << '\n';
  }
  std::cout << (all ? "selfcheck passed" : "selfcheck failed") << '\n';
  return all ? kExitOk : kExitSelfcheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Large deviations of the spherical ground state with an external field"};
  app.require_subcommand(1);

  RatesOptions ro;
  auto* rates = app.add_subcommand("rates", "Sweep closed-form and variational rate functions over m");
  rates->add_option("--gamma", ro.gamma, "Field strength")->capture_default_str();
  rates->add_option("--from", ro.from, "First m")->capture_default_str();
  rates->add_option("--to", ro.to, "Last m")->capture_default_str();
  rates->add_option("--step", ro.step, "Grid step")->capture_default_str();
  rates->add_option("--flavors", ro.flavors, "Comma-separated subset of quenched-gauss, annealed-gauss, quenched-haar, annealed-haar, fld")
      ->delimiter(',');
  rates->add_flag("--fig2", ro.fig2, "FLD minus annealed Gaussian rate on (m_c, m_L)");
  rates->add_option("--output", ro.output, "Output file (default stdout)");
  rates->add_option("--format", ro.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  std::string instance, solve_format = "text";
  auto* solve = app.add_subcommand("solve", "Maximize the spherical energy for one instance file");
  solve->add_option("instance", instance, "Instance file: 'n gamma' then n lines 'lambda h'")->required();
  solve->add_option("--format", solve_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  SimulateOptions so;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a key=value config");
  simulate->add_option("--config", so.config, "Experiment config")->required();
  simulate->add_option("--output", so.output, "Results file (default stdout)");
  simulate->add_option("--format", so.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  simulate->add_option("--dump-samples", so.dump_samples, "Write per-sample lambda1 and F to this CSV");
  simulate->add_option("--workers", so.workers, "Worker threads (0 = hardware concurrency)");
  simulate->add_option("--seed", so.seed, "Override the config seed");
  simulate->add_option("--samples", so.samples, "Override samples_per_n");
  simulate->add_option("--gamma", so.gamma, "Override gamma");

  bool skip_slow = false;
  auto* selfcheck = app.add_subcommand("selfcheck", "Run property suites and acceptance criteria");
  selfcheck->add_flag("--skip-slow", skip_slow, "Skip the Monte Carlo criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*rates) return cmd_rates(ro);
    if (*solve) return cmd_solve(instance, solve_format);
    if (*simulate) return cmd_simulate(so);
    if (*selfcheck) return cmd_selfcheck(skip_slow);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
