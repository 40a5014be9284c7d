#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>

#include "hris/sweep.hpp"
#include "hris/validate.hpp"

using nlohmann::json;
using namespace hris;

namespace {

json vec_json(const rvec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json result_json(const orchestrator::AoResult& r, const std::string& algorithm, std::uint64_t seed) {
  json out = {{"algorithm", algorithm}, {"seed", seed}, {"feasible", r.feasible}, {"converged", r.converged}, {"iterations", r.iterations}};
  out["trace"] = r.trace;
  if (!r.feasible) {
    out["message"] = r.message;
    return out;
  }
  out["total_cost"] = r.cost.total_cost;
  out["latency_sum"] = r.cost.latency_sum;
  out["energy_sum"] = r.cost.energy_sum();
  out["t"] = vec_json(r.alloc.t);
  out["p"] = vec_json(r.alloc.p);
  out["beta"] = vec_json(r.alloc.beta);
  out["f_local"] = vec_json(r.alloc.f_local);
  json slots = json::array();
  for (const auto& s : r.ris)
    slots.push_back({{"mode", s.mode}, {"amplification", vec_json(s.amplification)}, {"phase", vec_json(s.phase)}});
  out["ris"] = slots;
  return out;
}

struct ClosedFormArgs {
  std::string mode = "latency";
  std::optional<std::uint64_t> seed;
  std::string config;
  double g_ris_ap = 0.5;
  double g_user_ris = 0.5;
  int units = 6;
  double p_max = 0.01;
  double p_ris_max = 0.01;
  double sigma2 = 1e-11;
  double delta2 = 1e-11;
  double s_bits = 1e6;
  double t_max = 0.5;
  int n_start = 0;
  bool cap_rho = false;
};

int run_closedform(const ClosedFormArgs& a) {
  config::ExperimentConfig cfg;
  if (!a.config.empty()) cfg = config::load(a.config);
  auto params = cfg.system;
  auto user = cfg.user;
  auto task = cfg.task;
  closedform::ConservativeChannel cc{a.g_ris_ap, a.g_user_ris};
  int units = a.units;
  if (a.config.empty()) {
    params.p_ris_max = a.p_ris_max;
    params.ris_noise_power = a.sigma2;
    params.ap_noise_power = a.delta2;
    user.p_max = a.p_max;
    user.t_max = a.t_max;
    task.s_bits = a.s_bits;
  }
  json out = {{"mode", a.mode}};
  if (a.seed) {
    Dimensions dims{1, 1, a.config.empty() ? a.units : cfg.dims.units};
    const auto rz = channel::sample_channels(cfg.geometry, cfg.path_loss, dims, *a.seed, channel::Fading::los);
    cc = closedform::from_min_gains(channel::min_gains(rz, 0));
    units = dims.units;
    out["seed"] = *a.seed;
  }
  out["g_ris_ap"] = cc.g_ris_ap;
  out["g_user_ris"] = cc.g_user_ris;
  out["units"] = units;
  const closedform::ClosedFormOptions opt{a.cap_rho};
  if (a.mode == "latency") {
    auto s = closedform::latency_count(cc, user.p_max, params, units, opt);
    s = closedform::latency_time(s, task, user, params);
    out["threshold"] = closedform::active_threshold(user.p_max, params, units);
    out["n_act_continuous"] = s.n_act_continuous;
    out["n_act"] = s.n_act;
    out["n_pas"] = s.n_pas;
    out["rho"] = s.rho;
    out["sinr"] = s.sinr;
    out["t"] = number(s.t);
    out["feasible"] = s.feasible;
  } else if (a.mode == "energy") {
    const int n0 = a.n_start > 0 ? a.n_start : std::max(1, units / 2);
    const auto s = closedform::solve_energy(cc, n0, task, user, params, units, 1.0, opt);
    out["n_start"] = n0;
    out["verdict"] = closedform::verdict_name(s.verdict);
    out["feasible"] = s.verdict == closedform::EnergyVerdict::feasible;
    out["n_act"] = s.n_act;
    out["rho"] = s.rho;
    out["t"] = number(s.t);
    out["energy"] = number(s.energy);
    out["c4_margin"] = number(s.c4_margin);
    out["rounds"] = s.rounds;
  } else {
    throw std::invalid_argument("closedform: --mode must be 'latency' or 'energy'");
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid active-passive RIS edge-computing simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, grids_path, algorithm = "hybrid";
  std::uint64_t seed = 1;
  int threads = -1;

  auto* solve = app.add_subcommand("solve", "Run one algorithm on one seeded channel draw");
  solve->add_option("--config", config_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--seed", seed, "Channel seed")->required();
  solve->add_option("--algorithm", algorithm, "hybrid, fully_active, fully_passive, fully_local or fully_offloading");

  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep with CSV output");
  sweep_cmd->add_option("--config", config_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", out_dir, "Output directory")->required();
  sweep_cmd->add_option("--threads", threads, "Worker threads (default: config value)");

  ClosedFormArgs cf;
  auto* cform = app.add_subcommand("closedform", "Single-antenna closed-form latency or energy solution");
  cform->add_option("--mode", cf.mode, "latency or energy")->required()->check(CLI::IsMember({"latency", "energy"}));
  cform->add_option("--seed", cf.seed, "Derive |h|, |h_r| from a seeded line-of-sight draw");
  cform->add_option("--config", cf.config, "Take parameters from an experiment JSON")->check(CLI::ExistingFile);
  cform->add_option("--h-gain", cf.g_ris_ap, "|h|, RIS-AP gain");
  cform->add_option("--hr-gain", cf.g_user_ris, "|h_r|, user-RIS gain");
  cform->add_option("--units", cf.units, "N")->check(CLI::PositiveNumber);
  cform->add_option("--p-max", cf.p_max, "User transmit power, W");
  cform->add_option("--p-ris-max", cf.p_ris_max, "RIS amplification budget, W");
  cform->add_option("--sigma2", cf.sigma2, "RIS noise power, W");
  cform->add_option("--delta2", cf.delta2, "AP noise power, W");
  cform->add_option("--s-bits", cf.s_bits, "Task size, bits");
  cform->add_option("--t-max", cf.t_max, "Latency limit, s");
  cform->add_option("--n-start", cf.n_start, "Energy mode: initial active count");
  cform->add_flag("--cap-rho", cf.cap_rho, "Clamp rho to [1, rho_cap]");

  auto* oracle = app.add_subcommand("oracle", "Brute-force grid search on a desk-scale instance");
  oracle->add_option("--config", config_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
  oracle->add_option("--grids", grids_path, "Grid JSON")->check(CLI::ExistingFile);
  oracle->add_option("--seed", seed, "Channel seed");

  auto* val = app.add_subcommand("validate", "Run the invariant suite");
  std::uint64_t val_seed = 7;
  val->add_option("--seed", val_seed, "Seed of the random instances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      const auto cfg = config::load(config_path);
      const auto kind = orchestrator::parse_baseline(algorithm);
      if (!kind) throw std::invalid_argument("unknown algorithm: " + algorithm);
      const auto rz = channel::sample_channels(cfg.geometry, cfg.path_loss, cfg.dims, seed, cfg.fading);
      const sca::SurrogateBackend backend;
      const auto res = orchestrator::run_baseline(*kind, rz, cfg.problem(), cfg.convergence, backend);
      std::cout << result_json(res, algorithm, seed).dump(2) << "\n";
      return res.feasible ? 0 : 1;
    }
    if (*sweep_cmd) {
      const auto cfg = config::load(config_path);
      const auto result = sweep::run_sweep(cfg, threads >= 0 ? threads : cfg.threads);
      for (const auto& p : sweep::write_outputs(out_dir, cfg, result)) std::cout << p.string() << "\n";
      return 0;
    }
    if (*cform) return run_closedform(cf);
    if (*oracle) {
      auto cfg = config::load(config_path);
      if (!grids_path.empty()) {
        std::ifstream in(grids_path);
        if (!in) throw std::runtime_error("cannot open grid file: " + grids_path);
        cfg.oracle = json::parse(in).get<orchestrator::OracleGrids>();
      }
      const auto rz = channel::sample_channels(cfg.geometry, cfg.path_loss, cfg.dims, seed, cfg.fading);
      const auto res = orchestrator::brute_force_oracle(rz, cfg.problem(), cfg.oracle);
      json out = {{"seed", seed}, {"feasible", res.feasible}, {"cost", number(res.cost)}, {"census", res.census},
                  {"evaluated", res.evaluated}};
      if (res.feasible) {
        out["t"] = vec_json(res.alloc.t);
        out["p"] = vec_json(res.alloc.p);
        out["beta"] = vec_json(res.alloc.beta);
        json modes = json::array();
        for (const auto& s : res.ris) modes.push_back(s.mode);
        out["modes"] = modes;
      }
      std::cout << out.dump(2) << "\n";
      return res.feasible ? 0 : 1;
    }
    if (*val) {
      int failed = 0;
      for (const auto& c : validate::run_all(val_seed)) {
        std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        failed += c.ok ? 0 : 1;
      }
      return failed == 0 ? 0 : 1;
    }
  } catch (const unsupported_configuration& e) {
    std::cerr << "unsupported configuration: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
