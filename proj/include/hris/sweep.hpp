#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hris/config.hpp"

namespace hris::sweep {

inline constexpr const char* kVersion = "0.1.0";

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  double swept_value = 0.0;
  std::string algorithm;
  double total_cost = 0.0;
  double latency_sum = 0.0;
  double energy_sum = 0.0;
  std::vector<int> n_act;  // per slot
  int iterations = 0;
  bool converged = false;
  std::string status;  // "ok" or the infeasibility report
  double wall_time = 0.0;
};

inline constexpr const char* kCsvHeader =
    "trial,seed,swept_value,algorithm,total_cost,latency_sum,energy_sum,n_act,iterations,converged,status";

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_row(const TrialRecord& r) {
  std::string n_act;
  for (std::size_t i = 0; i < r.n_act.size(); ++i) n_act += (i ? ";" : "") + std::to_string(r.n_act[i]);
  std::ostringstream os;
  os << r.trial << ',' << r.seed << ',' << fmt(r.swept_value) << ',' << r.algorithm << ',' << fmt(r.total_cost) << ','
     << fmt(r.latency_sum) << ',' << fmt(r.energy_sum) << ',' << n_act << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
     << csv_quote(r.status);
  return os.str();
}

/// Seed of trial `trial`; identical across swept values so channels are matched.
inline std::uint64_t trial_seed(std::uint64_t master, int trial) {
  return rng::derive(master, {static_cast<std::uint64_t>(trial)});
}

inline TrialRecord run_trial(const config::ExperimentConfig& cfg, int trial, const std::string& algorithm, double swept_value) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialRecord r;
  r.trial = trial;
  r.seed = trial_seed(cfg.master_seed, trial);
  r.swept_value = swept_value;
  r.algorithm = algorithm;
  const auto rz = channel::sample_channels(cfg.geometry, cfg.path_loss, cfg.dims, r.seed, cfg.fading);
  const sca::SurrogateBackend backend;
  const auto kind = orchestrator::parse_baseline(algorithm);
  if (!kind) throw std::invalid_argument("unknown algorithm: " + algorithm);
  const auto res = orchestrator::run_baseline(*kind, rz, cfg.problem(), cfg.convergence, backend);
  r.iterations = res.iterations;
  r.converged = res.converged;
  if (res.feasible) {
    r.total_cost = res.cost.total_cost;
    r.latency_sum = res.cost.latency_sum;
    r.energy_sum = res.cost.energy_sum();
    for (const auto& s : res.ris) r.n_act.push_back(s.n_active());
    r.status = "ok";
  } else {
    r.total_cost = r.latency_sum = r.energy_sum = std::numeric_limits<double>::quiet_NaN();
    r.status = "infeasible: " + res.message;
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

struct SweepResult {
  std::string parameter;
  std::vector<TrialRecord> records;  // ordered by (swept value, trial, algorithm)
};

/// Runs every (swept value, trial, algorithm) job. Jobs are independent and
/// results are stored by job index, so the output does not depend on `threads`.
inline SweepResult run_sweep(const config::ExperimentConfig& cfg, int threads = 0) {
  SweepResult out;
  out.parameter = cfg.sweep.parameter.empty() ? "none" : cfg.sweep.parameter;
  const std::vector<double> values = cfg.sweep.parameter.empty() ? std::vector<double>{0.0} : cfg.sweep.values;
  std::vector<config::ExperimentConfig> per_value;
  for (double v : values) {
    auto c = cfg;
    if (!cfg.sweep.parameter.empty()) config::apply_parameter(c, cfg.sweep.parameter, v);
    config::validate(c);
    per_value.push_back(std::move(c));
  }
  const std::size_t n_alg = cfg.algorithms.size();
  const std::size_t jobs = values.size() * static_cast<std::size_t>(cfg.trials) * n_alg;
  out.records.resize(jobs);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t a = j % n_alg;
      const std::size_t rest = j / n_alg;
      const int trial = static_cast<int>(rest % static_cast<std::size_t>(cfg.trials));
      const std::size_t vi = rest / static_cast<std::size_t>(cfg.trials);
      out.records[j] = run_trial(per_value[vi], trial, cfg.algorithms[a], values[vi]);
    }
  };
  int n = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(jobs, 1)));
  {
    std::vector<std::jthread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
  }
  return out;
}

inline std::string to_csv(const SweepResult& s) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : s.records) out += csv_row(r) + "\n";
  return out;
}

inline std::string timing_csv(const SweepResult& s) {
  std::string out = "trial,swept_value,algorithm,wall_time\n";
  for (const auto& r : s.records) out += std::to_string(r.trial) + "," + fmt(r.swept_value) + "," + r.algorithm + "," + fmt(r.wall_time) + "\n";
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

/// Writes sweep_<axis>.csv, timing_<axis>.csv and manifest.json into `dir`.
inline std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const config::ExperimentConfig& cfg,
                                                        const SweepResult& s) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
  const auto csv = dir / ("sweep_" + s.parameter + ".csv");
  const auto timing = dir / ("timing_" + s.parameter + ".csv");
  const auto manifest = dir / "manifest.json";
  write_file(csv, to_csv(s));
  write_file(timing, timing_csv(s));
  nlohmann::json m = {{"version", kVersion},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)},
                      {"compiler", __VERSION__},
                      {"master_seed", cfg.master_seed},
                      {"config", config::to_json(cfg)},
                      {"outputs", {csv.filename().string(), timing.filename().string()}}};
  write_file(manifest, m.dump(2) + "\n");
  return {csv, timing, manifest};
}

}  // namespace hris::sweep
