#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ensembles.hpp"
#include "errors.hpp"
#include "extended.hpp"
#include "io.hpp"
#include "measures.hpp"
#include "rates_closed.hpp"
#include "rng.hpp"
#include "semicircle.hpp"
#include "sphereopt.hpp"

namespace sphereldp {

enum class ExperimentMode { quenched_fixed_spectrum, annealed_goe, annealed_wigner };
enum class FieldKind { haar, gauss };
enum class Convention { window, tail };

inline const char* to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::quenched_fixed_spectrum: return "quenched-fixed-spectrum";
    case ExperimentMode::annealed_goe: return "annealed-goe";
    default: return "annealed-wigner";
  }
}
inline const char* to_string(FieldKind f) { return f == FieldKind::haar ? "haar" : "gauss"; }
inline const char* to_string(Convention c) { return c == Convention::window ? "window" : "tail"; }

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::quenched_fixed_spectrum;
  FieldKind field = FieldKind::gauss;
  double gamma = 1;
  std::vector<std::size_t> n_list;
  std::size_t samples_per_n = 0;
  double delta = 0.05;
  std::vector<double> m_grid;
  RngSeed seed;
  std::string spectrum = "semicircle";  // or "file"
  std::string spectrum_file;
  DistributionSpec diag{DistributionSpec::Kind::gaussian, 2.0};
  DistributionSpec offdiag{DistributionSpec::Kind::gaussian, 1.0};
  EigenOptions eigen;
  unsigned workers = 1;

  void validate() const {
    if (n_list.empty()) throw std::invalid_argument("config: n_list is empty");
    if (!std::is_sorted(n_list.begin(), n_list.end()) ||
        std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end())
      throw std::invalid_argument("config: n_list must be strictly ascending");
    if (n_list.front() == 0) throw std::invalid_argument("config: n must be >= 1");
    if (samples_per_n < 1) throw std::invalid_argument("config: samples_per_n must be >= 1");
    if (!(delta > 0)) throw std::invalid_argument("config: delta must be > 0");
    if (!(gamma > 0)) throw std::invalid_argument("config: gamma must be > 0");
    if (m_grid.empty()) throw std::invalid_argument("config: m_grid is empty");
    if (mode == ExperimentMode::quenched_fixed_spectrum && spectrum != "semicircle" && spectrum != "file")
      throw std::invalid_argument("config: spectrum must be 'semicircle' or 'file'");
    if (mode == ExperimentMode::quenched_fixed_spectrum && spectrum == "file" && spectrum_file.empty())
      throw std::invalid_argument("config: spectrum_file required");
  }
};

namespace detail {

template <class T, class F>
std::vector<T> parse_list(const std::string& v, F&& one) {
  std::vector<T> out;
  for (auto& part : io::split(v, ',')) {
    auto t = io::trim(part);
    if (!t.empty()) out.push_back(one(std::string(t)));
  }
  return out;
}

}  // namespace detail

// key = value lines, '#' comments. Lists are comma separated; m_grid also accepts from:to:step.
inline ExperimentConfig parse_experiment_config(std::istream& is, const std::string& source = "<config>") {
  ExperimentConfig c;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(is, line)) {
    ++ln;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto t = io::trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos) throw parse_error(source, ln, "expected key = value");
    const std::string key(io::trim(t.substr(0, eq)));
    const std::string val(io::trim(t.substr(eq + 1)));
    auto num = [&](const std::string& s) { return io::parse_double(s, source, ln); };
    auto integer = [&](const std::string& s) {
      long long v = io::parse_int(s, source, ln);
      if (v < 0) throw parse_error(source, ln, "negative integer for " + key);
      return static_cast<std::size_t>(v);
    };
    try {
      if (key == "mode") {
        if (val == "quenched-fixed-spectrum")
          c.mode = ExperimentMode::quenched_fixed_spectrum;
        else if (val == "annealed-goe")
          c.mode = ExperimentMode::annealed_goe;
        else if (val == "annealed-wigner")
          c.mode = ExperimentMode::annealed_wigner;
        else
          throw parse_error(source, ln, "unknown mode '" + val + "'");
      } else if (key == "field") {
        if (val == "haar")
          c.field = FieldKind::haar;
        else if (val == "gauss")
          c.field = FieldKind::gauss;
        else
          throw parse_error(source, ln, "unknown field '" + val + "'");
      } else if (key == "gamma") {
        c.gamma = num(val);
      } else if (key == "n_list") {
        c.n_list = detail::parse_list<std::size_t>(val, integer);
      } else if (key == "samples_per_n") {
        c.samples_per_n = integer(val);
      } else if (key == "delta") {
        c.delta = num(val);
      } else if (key == "m_grid") {
        auto parts = io::split(val, ':');
        if (parts.size() == 3) {
          const double a = num(parts[0]), b = num(parts[1]), st = num(parts[2]);
          if (!(st > 0) || !(b >= a)) throw parse_error(source, ln, "bad m_grid range");
          c.m_grid.clear();
          const auto cnt = static_cast<std::size_t>(std::floor((b - a) / st + 1e-9));
          for (std::size_t k = 0; k <= cnt; ++k) c.m_grid.push_back(a + st * static_cast<double>(k));
        } else {
          c.m_grid = detail::parse_list<double>(val, num);
        }
      } else if (key == "seed") {
        c.seed.seed = std::stoull(val);
      } else if (key == "stream") {
        c.seed.stream = std::stoull(val);
      } else if (key == "spectrum") {
        c.spectrum = val;
      } else if (key == "spectrum_file") {
        c.spectrum = "file";
        c.spectrum_file = val;
      } else if (key == "diag") {
        c.diag = DistributionSpec::parse(val);
      } else if (key == "offdiag") {
        c.offdiag = DistributionSpec::parse(val);
      } else if (key == "workers") {
        c.workers = static_cast<unsigned>(integer(val));
      } else if (key == "eigen_method") {
        if (val == "auto")
          c.eigen.method = EigenMethod::automatic;
        else if (val == "jacobi")
          c.eigen.method = EigenMethod::jacobi;
        else if (val == "tridiagonal")
          c.eigen.method = EigenMethod::tridiagonal;
        else
          throw parse_error(source, ln, "unknown eigen_method '" + val + "'");
      } else if (key == "jacobi_tolerance") {
        c.eigen.jacobi_tolerance = num(val);
      } else {
        throw parse_error(source, ln, "unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw parse_error(source, ln, e.what());
    } catch (const std::out_of_range&) {
      throw parse_error(source, ln, "value out of range for " + key);
    }
  }
  return c;
}

inline OrderedSpectrum read_spectrum_file(std::istream& is, const std::string& source = "<spectrum>") {
  std::vector<double> v;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(is, line)) {
    ++ln;
    for (auto& tok : io::tokens(line)) v.push_back(io::parse_double(tok, source, ln));
  }
  if (v.empty()) throw parse_error(source, ln, "empty spectrum");
  return OrderedSpectrum::sorted(std::move(v));
}

struct WilsonInterval {
  double low = 0;
  double high = 1;
};

inline constexpr double kWilsonZ95 = 1.959963984540054;

inline WilsonInterval wilson_interval(std::uint64_t count, std::uint64_t total, double z = kWilsonZ95) {
  if (total == 0) throw std::invalid_argument("wilson_interval: total must be > 0");
  if (count > total) throw std::invalid_argument("wilson_interval: count > total");
  const double n = static_cast<double>(total), p = static_cast<double>(count) / n, z2 = z * z;
  const double denom = 1 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct RateEstimate {
  double m = 0;
  std::size_t n = 0;
  Convention convention = Convention::window;
  std::uint64_t count = 0;
  std::uint64_t total = 0;
  Extended rate_hat = Extended::infinity();
  double wilson_low = 0;
  double wilson_high = 1;
  std::optional<Extended> reference_rate;
};

inline Extended empirical_rate(std::uint64_t count, std::uint64_t total, std::size_t n) {
  if (count == 0) return Extended::infinity();
  return std::max(0.0, -std::log(static_cast<double>(count) / static_cast<double>(total)) / static_cast<double>(n));
}

struct SampleRecord {
  std::size_t n = 0;
  std::size_t sample_index = 0;
  double lambda1 = 0;
  double f = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RateEstimate> estimates;
  std::vector<std::pair<std::size_t, double>> mean_f;  // (n, mean F)
  std::vector<SampleRecord> samples;
};

namespace detail {

// Runs body(i) for i in [0, count) on `workers` threads, contiguous chunks.
inline void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * chunk; i < std::min(count, (w + 1) * chunk); ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline void check_sandwich(double f, double lambda1, double norm_h, std::size_t n, std::size_t s) {
  const double tol = 1e-9 * std::max({1.0, std::abs(lambda1), norm_h});
  if (f < 0.5 * lambda1 - tol || f > 0.5 * lambda1 + norm_h + tol)
    throw numeric_failure("sandwich bound violated at n=" + std::to_string(n) + " sample " + std::to_string(s));
}

inline std::vector<double> draw_field(FieldKind kind, std::size_t n, double gamma, RngSeed seed) {
  return kind == FieldKind::haar ? sample_haar_sphere(n, gamma, seed) : sample_gauss_field(n, gamma, seed);
}

inline std::optional<Extended> reference_rate(const ExperimentConfig& c, double m, Convention conv) {
  Extended rate;
  double zero;
  const bool semicircle_q = c.mode == ExperimentMode::quenched_fixed_spectrum && c.spectrum == "semicircle";
  if (semicircle_q) {
    rate = c.field == FieldKind::gauss ? quenched_gauss_semicircle(m, c.gamma).value
                                       : quenched_haar_semicircle(m, c.gamma).value;
  } else if (c.mode == ExperimentMode::annealed_goe) {
    rate = c.field == FieldKind::gauss ? annealed_gauss(m, c.gamma).value : annealed_haar(m, c.gamma);
  } else {
    return std::nullopt;
  }
  zero = std::sqrt(1 + c.gamma);
  if (conv == Convention::tail && m < zero) return Extended(0.0);
  return rate;
}

inline void aggregate(const ExperimentConfig& c, std::size_t n, const std::vector<double>& f, ExperimentResult& out) {
  out.mean_f.emplace_back(n, std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size()));
  for (double m : c.m_grid) {
    for (Convention conv : {Convention::window, Convention::tail}) {
      std::uint64_t count = 0;
      for (double v : f) count += conv == Convention::window ? (std::abs(v - m) < c.delta) : (v >= m);
      RateEstimate e;
      e.m = m;
      e.n = n;
      e.convention = conv;
      e.count = count;
      e.total = f.size();
      e.rate_hat = empirical_rate(count, f.size(), n);
      auto w = wilson_interval(count, f.size());
      e.wilson_low = w.low;
      e.wilson_high = w.high;
      e.reference_rate = reference_rate(c, m, conv);
      out.estimates.push_back(e);
    }
  }
}

inline RngSeed sample_seed(const ExperimentConfig& c, std::size_t n, std::uint64_t slot) {
  return {c.seed.seed, c.seed.stream + (static_cast<std::uint64_t>(n) << 32) + slot};
}

}  // namespace detail

// Fixed spectrum (semicircle quantiles or file), random field.
inline ExperimentResult run_quenched_experiment(const ExperimentConfig& c, bool keep_samples = false) {
  c.validate();
  if (c.mode != ExperimentMode::quenched_fixed_spectrum)
    throw std::invalid_argument("run_quenched_experiment: mode must be quenched-fixed-spectrum");
  std::optional<OrderedSpectrum> file_spec;
  if (c.spectrum == "file") {
    std::ifstream in(c.spectrum_file);
    if (!in) throw std::invalid_argument("cannot open spectrum file " + c.spectrum_file);
    file_spec = read_spectrum_file(in, c.spectrum_file);
    if (c.n_list.size() != 1 || c.n_list.front() != file_spec->size())
      throw std::invalid_argument("config: n_list must equal the spectrum file length");
  }
  ExperimentResult out;
  out.config = c;
  for (std::size_t n : c.n_list) {
    const OrderedSpectrum lambda = file_spec ? *file_spec : semicircle_spectrum(n);
    std::vector<double> f(c.samples_per_n);
    detail::parallel_for(c.samples_per_n, c.workers, [&](std::size_t s) {
      const auto h = detail::draw_field(c.field, n, c.gamma, detail::sample_seed(c, n, s));
      f[s] = solve_secular(lambda, h).f_star;
      double norm = 0;
      for (double x : h) norm += x * x;
      detail::check_sandwich(f[s], lambda.top(), std::sqrt(norm), n, s);
    });
    if (keep_samples)
      for (std::size_t s = 0; s < f.size(); ++s) out.samples.push_back({n, s, lambda.top(), f[s]});
    detail::aggregate(c, n, f, out);
  }
  return out;
}

// Fresh matrix and field per sample.
inline ExperimentResult run_annealed_experiment(const ExperimentConfig& c, bool keep_samples = false) {
  c.validate();
  if (c.mode == ExperimentMode::quenched_fixed_spectrum)
    throw std::invalid_argument("run_annealed_experiment: mode must be annealed-goe or annealed-wigner");
  ExperimentResult out;
  out.config = c;
  for (std::size_t n : c.n_list) {
    std::vector<double> f(c.samples_per_n), l1(c.samples_per_n);
    detail::parallel_for(c.samples_per_n, c.workers, [&](std::size_t s) {
      const RngSeed ms = detail::sample_seed(c, n, 2 * s), fs = detail::sample_seed(c, n, 2 * s + 1);
      const SymmetricMatrix w =
          c.mode == ExperimentMode::annealed_goe ? sample_goe(n, ms) : sample_wigner(n, c.diag, c.offdiag, ms);
      const auto h = detail::draw_field(c.field, n, c.gamma, fs);
      const auto sol = f_value_detail(w, h, c.eigen);
      f[s] = sol.f;
      l1[s] = sol.lambda1;
      double norm = 0;
      for (double x : h) norm += x * x;
      detail::check_sandwich(sol.f, sol.lambda1, std::sqrt(norm), n, s);
    });
    if (keep_samples)
      for (std::size_t s = 0; s < f.size(); ++s) out.samples.push_back({n, s, l1[s], f[s]});
    detail::aggregate(c, n, f, out);
  }
  return out;
}

inline ExperimentResult run_experiment(const ExperimentConfig& c, bool keep_samples = false) {
  return c.mode == ExperimentMode::quenched_fixed_spectrum ? run_quenched_experiment(c, keep_samples)
                                                           : run_annealed_experiment(c, keep_samples);
}

inline constexpr const char* kResultsHeader =
    "mode,field,gamma,n,m,delta,convention,count,total,rate_hat,wilson_low,wilson_high,reference_rate";

inline void write_results_csv(std::ostream& os, const ExperimentResult& r) {
  os << kResultsHeader << '\n';
  const auto& c = r.config;
  for (const auto& e : r.estimates) {
    os << to_string(c.mode) << ',' << to_string(c.field) << ',' << io::fmt(c.gamma) << ',' << e.n << ','
       << io::fmt(e.m) << ',' << io::fmt(c.delta) << ',' << to_string(e.convention) << ',' << e.count << ','
       << e.total << ',' << io::fmt(e.rate_hat) << ',' << io::fmt(e.wilson_low) << ',' << io::fmt(e.wilson_high)
       << ',' << (e.reference_rate ? io::fmt(*e.reference_rate) : std::string()) << '\n';
  }
}

namespace detail {
inline nlohmann::json json_number(Extended e) {
  return e.finite() ? nlohmann::json(e.value()) : nlohmann::json("inf");
}
}  // namespace detail

inline nlohmann::json results_json(const ExperimentResult& r) {
  const auto& c = r.config;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : r.estimates) {
    rows.push_back({{"mode", to_string(c.mode)},
                    {"field", to_string(c.field)},
                    {"gamma", c.gamma},
                    {"n", e.n},
                    {"m", e.m},
                    {"delta", c.delta},
                    {"convention", to_string(e.convention)},
                    {"count", e.count},
                    {"total", e.total},
                    {"rate_hat", detail::json_number(e.rate_hat)},
                    {"wilson_low", e.wilson_low},
                    {"wilson_high", e.wilson_high},
                    {"reference_rate", e.reference_rate ? detail::json_number(*e.reference_rate) : nlohmann::json()}});
  }
  nlohmann::json mean = nlohmann::json::array();
  for (auto& [n, v] : r.mean_f) mean.push_back({{"n", n}, {"mean_f", v}});
  return {{"rows", rows}, {"mean_f", mean}};
}

inline void write_samples_csv(std::ostream& os, const ExperimentResult& r) {
  os << "n,sample_index,lambda1,F\n";
  for (const auto& s : r.samples)
    os << s.n << ',' << s.sample_index << ',' << io::fmt(s.lambda1) << ',' << io::fmt(s.f) << '\n';
}

struct ChiSquareBin {
  std::vector<double> center;
  std::uint64_t count = 0;
  std::uint64_t total = 0;
  Extended empirical_rate = Extended::infinity();
  Extended predicted_rate = Extended::infinity();
};

// Block sizes proportional to the fractions (largest remainder).
inline std::vector<std::size_t> block_sizes(std::span<const double> fractions, std::size_t n) {
  const std::size_t k = fractions.size();
  if (k < 2) throw std::invalid_argument("chi_square_block_check: need at least 2 blocks");
  double sum = 0;
  for (double f : fractions) {
    if (!(f > 0)) throw std::invalid_argument("chi_square_block_check: fractions must be > 0");
    sum += f;
  }
  if (std::abs(sum - 1) > 1e-12) throw std::invalid_argument("chi_square_block_check: fractions must sum to 1");
  std::vector<std::size_t> sz(k);
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double exact = fractions[i] * static_cast<double>(n);
    sz[i] = static_cast<std::size_t>(std::floor(exact));
    used += sz[i];
    rem.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (std::size_t j = 0; used < n; ++j, ++used) ++sz[rem[j % k].second];
  for (auto s : sz)
    if (s == 0) throw std::invalid_argument("chi_square_block_check: degenerate partition (empty block)");
  return sz;
}

// Sum of l squared standard normals, drawn as a Gamma(l/2, 2) variate.
inline double chi_square_draw(CounterRng& rng, std::size_t l) {
  double s = 0;
  std::size_t pairs = l / 2;
  while (pairs > 0) {
    const std::size_t chunk = std::min<std::size_t>(pairs, 16);
    double prod = 1;
    for (std::size_t j = 0; j < chunk; ++j) prod *= rng.uniform();
    s -= 2 * std::log(prod);
    pairs -= chunk;
  }
  if (l % 2 == 1) {
    const double z = rng.normal();
    s += z * z;
  }
  return s;
}

inline Extended chi_square_block_rate(std::span<const double> mu, std::span<const double> x) {
  double h = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (x[i] <= 0) return Extended::infinity();
    h += mu[i] * std::log(mu[i] / x[i]);
  }
  return 0.5 * std::max(0.0, h);
}

// Bins of width `bin_width` centered on multiples of it, over the first K-1 coordinates.
inline std::vector<ChiSquareBin> chi_square_block_check(std::span<const double> fractions, std::size_t n,
                                                        std::uint64_t samples, RngSeed seed,
                                                        double bin_width = 0.05, unsigned workers = 1) {
  if (samples == 0) throw std::invalid_argument("chi_square_block_check: samples must be >= 1");
  if (!(bin_width > 0) || bin_width > 0.5) throw std::invalid_argument("chi_square_block_check: bad bin width");
  const auto sizes = block_sizes(fractions, n);
  const std::size_t k = sizes.size();
  const long long per_axis = static_cast<long long>(std::llround(1.0 / bin_width));
  if (std::abs(per_axis * bin_width - 1.0) > 1e-12)
    throw std::invalid_argument("chi_square_block_check: 1/bin_width must be an integer");
  if (k > 6) throw std::invalid_argument("chi_square_block_check: at most 6 blocks");

  auto key_of = [&](const std::vector<long long>& idx) {
    long long key = 0;
    for (auto v : idx) key = key * (per_axis + 1) + v;
    return key;
  };

  unsigned nw = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
  nw = static_cast<unsigned>(std::min<std::uint64_t>(nw, samples));
  std::vector<std::map<long long, std::uint64_t>> partial(nw);
  const std::uint64_t chunk = (samples + nw - 1) / nw;
  detail::parallel_for(nw, nw, [&](std::size_t w) {
    std::vector<double> s(k);
    std::vector<long long> idx(k - 1);
    auto& counts = partial[w];
    for (std::uint64_t i = w * chunk; i < std::min<std::uint64_t>(samples, (w + 1) * chunk); ++i) {
      CounterRng rng({seed.seed, seed.stream + i});
      double total = 0;
      for (std::size_t b = 0; b < k; ++b) total += (s[b] = chi_square_draw(rng, sizes[b]));
      for (std::size_t b = 0; b + 1 < k; ++b) idx[b] = std::llround(s[b] / total / bin_width);
      ++counts[key_of(idx)];
    }
  });
  std::map<long long, std::uint64_t> counts;
  for (auto& p : partial)
    for (auto& [key, v] : p) counts[key] += v;

  std::vector<ChiSquareBin> out;
  std::vector<long long> idx(k - 1, 0);
  const std::vector<double> mu(fractions.begin(), fractions.end());
  for (;;) {
    long long used = std::accumulate(idx.begin(), idx.end(), 0LL);
    if (used <= per_axis) {
      ChiSquareBin bin;
      double rest = 1;
      for (auto v : idx) {
        bin.center.push_back(static_cast<double>(v) * bin_width);
        rest -= bin.center.back();
      }
      bin.center.push_back(std::max(0.0, rest));
      auto it = counts.find(key_of(idx));
      bin.count = it == counts.end() ? 0 : it->second;
      bin.total = samples;
      bin.empirical_rate = empirical_rate(bin.count, samples, n);
      bin.predicted_rate = chi_square_block_rate(mu, bin.center);
      out.push_back(std::move(bin));
    }
    std::size_t pos = idx.size();
    while (pos > 0) {
      --pos;
      if (++idx[pos] <= per_axis) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
    if (idx.empty()) return out;
  }
}

}  // namespace sphereldp
