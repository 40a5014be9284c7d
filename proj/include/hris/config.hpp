#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hris/channel.hpp"
#include "hris/model.hpp"
#include "hris/orchestrator.hpp"

namespace hris::orchestrator {

inline void to_json(nlohmann::json& j, const OracleGrids& g) {
  j = {{"phase_levels", g.phase_levels}, {"rho_step", g.rho_step}, {"beta_levels", g.beta_levels}, {"power_levels", g.power_levels},
       {"budget", g.budget}};
}

inline void from_json(const nlohmann::json& j, OracleGrids& g) {
  if (j.contains("phase_levels")) g.phase_levels = j.at("phase_levels").get<int>();
  if (j.contains("rho_step")) g.rho_step = j.at("rho_step").get<double>();
  if (j.contains("beta_levels")) g.beta_levels = j.at("beta_levels").get<int>();
  if (j.contains("power_levels")) g.power_levels = j.at("power_levels").get<int>();
  if (j.contains("budget")) g.budget = j.at("budget").get<double>();
}

}  // namespace hris::orchestrator

namespace hris::config {

using nlohmann::json;

struct SweepAxis {
  std::string parameter;  // key as written in the config, unit suffix included
  std::vector<double> values;
};

struct ExperimentConfig {
  Dimensions dims{2, 8, 6};
  channel::Geometry geometry;
  channel::PathLossModel path_loss;
  channel::Fading fading = channel::Fading::rayleigh;
  model::SystemParams system;
  model::UserParams user;
  model::Task task;
  int trials = 20;
  std::uint64_t master_seed = 1;
  std::string backend = "surrogate";
  SweepAxis sweep;
  std::vector<std::string> algorithms{"hybrid", "fully_active", "fully_passive", "fully_local", "fully_offloading"};
  orchestrator::AoOptions convergence;
  orchestrator::OracleGrids oracle;
  int threads = 0;  // 0: hardware concurrency

  orchestrator::Problem problem() const {
    return {std::vector<model::Task>(dims.users, task), std::vector<model::UserParams>(dims.users, user), system};
  }
};

namespace detail {

/// Reads `name`, `name_dbm` or `name_db` and returns the linear value.
inline bool read_quantity(const json& j, const std::string& name, double& out) {
  if (j.contains(name)) {
    out = j.at(name).get<double>();
    return true;
  }
  if (j.contains(name + "_dbm")) {
    out = dbm_to_watt(j.at(name + "_dbm").get<double>());
    return true;
  }
  if (j.contains(name + "_db")) {
    out = db_to_linear(j.at(name + "_db").get<double>());
    return true;
  }
  return false;
}

inline channel::Point read_point(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) throw std::invalid_argument("config: positions need two coordinates");
  return {v[0], v[1]};
}

inline std::string strip_unit(const std::string& name, int* kind) {
  *kind = 0;
  auto ends = [&](const std::string& s) { return name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0; };
  if (ends("_dbm")) {
    *kind = 2;
    return name.substr(0, name.size() - 4);
  }
  if (ends("_db")) {
    *kind = 1;
    return name.substr(0, name.size() - 3);
  }
  return name;
}

}  // namespace detail

/// Sets one named parameter; `name` may carry a `_db` / `_dbm` suffix.
inline void apply_parameter(ExperimentConfig& c, const std::string& name, double value) {
  int kind = 0;
  const std::string base = detail::strip_unit(name, &kind);
  const double v = kind == 2 ? dbm_to_watt(value) : kind == 1 ? db_to_linear(value) : value;
  auto as_count = [&]() {
    if (v < 1.0 || v != std::floor(v)) throw std::invalid_argument("config: " + name + " must be a positive integer");
    return static_cast<int>(v);
  };
  if (base == "users") c.dims.users = as_count();
  else if (base == "antennas") c.dims.antennas = as_count();
  else if (base == "units") c.dims.units = static_cast<int>(v);
  else if (base == "bandwidth") c.system.bandwidth = v;
  else if (base == "ris_noise_power") c.system.ris_noise_power = v;
  else if (base == "ap_noise_power") c.system.ap_noise_power = v;
  else if (base == "p_circuit") c.system.p_circuit = v;
  else if (base == "p_dc") c.system.p_dc = v;
  else if (base == "p_ris_max") c.system.p_ris_max = v;
  else if (base == "tradeoff") c.system.tradeoff = {v};
  else if (base == "energy_scale") c.system.energy_scale = v;
  else if (base == "rho_cap") c.system.rho_cap = v;
  else if (base == "e_max") c.user.e_max = v;
  else if (base == "f_max") c.user.f_max = v;
  else if (base == "t_max") c.user.t_max = v;
  else if (base == "kappa") c.user.kappa = v;
  else if (base == "p_max") c.user.p_max = v;
  else if (base == "s_bits") c.task.s_bits = v;
  else if (base == "c_cycles") c.task.c_cycles = v;
  else if (base == "a0") c.path_loss.a0 = v;
  else throw std::invalid_argument("config: unknown parameter '" + name + "'");
}

inline void validate(const ExperimentConfig& c) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + what);
  };
  need(c.dims.users > 0 && c.dims.antennas > 0 && c.dims.units >= 0, "users and antennas must be positive, units non-negative");
  need(c.system.bandwidth > 0.0 && c.system.ris_noise_power > 0.0 && c.system.ap_noise_power > 0.0, "bandwidth and noise powers must be positive");
  need(c.system.p_circuit > 0.0 && c.system.p_dc > 0.0 && c.system.p_ris_max > 0.0, "RIS powers must be positive");
  for (double w : c.system.tradeoff) need(w >= 0.0 && w <= 1.0, "tradeoff weights must lie in [0,1]");
  need(c.user.e_max > 0.0 && c.user.f_max > 0.0 && c.user.t_max > 0.0 && c.user.kappa > 0.0 && c.user.p_max > 0.0,
       "user parameters must be positive");
  need(c.task.s_bits > 0.0 && c.task.c_cycles > 0.0, "task sizes must be positive");
  need(c.path_loss.a0 > 0.0 && c.path_loss.d0 > 0.0, "path loss reference values must be positive");
  need(c.geometry.user_circle.radius >= 0.0, "user circle radius must be non-negative");
  need(c.convergence.l_max >= 1, "l_max must be at least 1");
  need(c.convergence.epsilon > 0.0, "epsilon must be positive");
  need(c.trials >= 1, "trials must be at least 1");
  need(c.sweep.parameter.empty() || !c.sweep.values.empty(), "sweep values must be non-empty");
  need(c.backend == "surrogate", "only the 'surrogate' backend is available");
  for (const auto& a : c.algorithms) need(orchestrator::parse_baseline(a).has_value(), "unknown algorithm id");
}

inline ExperimentConfig from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("users")) c.dims.users = j.at("users").get<int>();
  if (j.contains("antennas")) c.dims.antennas = j.at("antennas").get<int>();
  if (j.contains("units")) c.dims.units = j.at("units").get<int>();

  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    if (g.contains("ap_position")) c.geometry.ap_position = detail::read_point(g.at("ap_position"));
    if (g.contains("ris_position")) c.geometry.ris_position = detail::read_point(g.at("ris_position"));
    if (g.contains("user_positions"))
      for (const auto& p : g.at("user_positions")) c.geometry.user_positions.push_back(detail::read_point(p));
    if (g.contains("user_circle")) {
      const auto& uc = g.at("user_circle");
      if (uc.contains("center")) c.geometry.user_circle.center = detail::read_point(uc.at("center"));
      if (uc.contains("radius")) c.geometry.user_circle.radius = uc.at("radius").get<double>();
    }
  }
  if (j.contains("path_loss")) {
    const auto& p = j.at("path_loss");
    detail::read_quantity(p, "a0", c.path_loss.a0);
    detail::read_quantity(p, "d0", c.path_loss.d0);
    detail::read_quantity(p, "exponent_ap_ris", c.path_loss.exponent_ap_ris);
    detail::read_quantity(p, "exponent_ris_user", c.path_loss.exponent_ris_user);
    detail::read_quantity(p, "exponent_ap_user", c.path_loss.exponent_ap_user);
  }
  if (j.contains("fading")) {
    const auto f = j.at("fading").get<std::string>();
    if (f == "rayleigh") c.fading = channel::Fading::rayleigh;
    else if (f == "los") c.fading = channel::Fading::los;
    else throw std::invalid_argument("config: fading must be 'rayleigh' or 'los'");
  }
  if (j.contains("system")) {
    const auto& s = j.at("system");
    detail::read_quantity(s, "bandwidth", c.system.bandwidth);
    detail::read_quantity(s, "ris_noise_power", c.system.ris_noise_power);
    detail::read_quantity(s, "ap_noise_power", c.system.ap_noise_power);
    detail::read_quantity(s, "p_circuit", c.system.p_circuit);
    detail::read_quantity(s, "p_dc", c.system.p_dc);
    detail::read_quantity(s, "p_ris_max", c.system.p_ris_max);
    detail::read_quantity(s, "energy_scale", c.system.energy_scale);
    detail::read_quantity(s, "rho_cap", c.system.rho_cap);
    if (s.contains("tradeoff")) {
      const auto& t = s.at("tradeoff");
      c.system.tradeoff = t.is_array() ? t.get<std::vector<double>>() : std::vector<double>{t.get<double>()};
    }
  }
  if (j.contains("user")) {
    const auto& u = j.at("user");
    detail::read_quantity(u, "e_max", c.user.e_max);
    detail::read_quantity(u, "f_max", c.user.f_max);
    detail::read_quantity(u, "t_max", c.user.t_max);
    detail::read_quantity(u, "kappa", c.user.kappa);
    detail::read_quantity(u, "p_max", c.user.p_max);
  }
  if (j.contains("task")) {
    const auto& t = j.at("task");
    detail::read_quantity(t, "s_bits", c.task.s_bits);
    detail::read_quantity(t, "c_cycles", c.task.c_cycles);
  }
  if (j.contains("trials")) c.trials = j.at("trials").get<int>();
  if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("backend")) c.backend = j.at("backend").get<std::string>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    c.sweep.parameter = s.at("parameter").get<std::string>();
    c.sweep.values = s.at("values").get<std::vector<double>>();
  }
  if (j.contains("algorithms")) c.algorithms = j.at("algorithms").get<std::vector<std::string>>();
  if (j.contains("convergence")) {
    const auto& v = j.at("convergence");
    if (v.contains("l_max")) c.convergence.l_max = v.at("l_max").get<int>();
    if (v.contains("epsilon")) c.convergence.epsilon = v.at("epsilon").get<double>();
    if (v.contains("sca_max")) c.convergence.sca_max = v.at("sca_max").get<int>();
  }
  if (j.contains("oracle")) c.oracle = j.at("oracle").get<orchestrator::OracleGrids>();
  validate(c);
  return c;
}

inline ExperimentConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("cannot parse config file " + path + ": " + e.what());
  }
  return from_json(j);
}

/// Echo of the effective configuration in linear units.
inline json to_json(const ExperimentConfig& c) {
  json g = {{"ap_position", c.geometry.ap_position},
            {"ris_position", c.geometry.ris_position},
            {"user_circle", {{"center", c.geometry.user_circle.center}, {"radius", c.geometry.user_circle.radius}}}};
  if (!c.geometry.user_positions.empty()) g["user_positions"] = c.geometry.user_positions;
  return {
      {"users", c.dims.users},
      {"antennas", c.dims.antennas},
      {"units", c.dims.units},
      {"geometry", g},
      {"path_loss",
       {{"a0", c.path_loss.a0},
        {"d0", c.path_loss.d0},
        {"exponent_ap_ris", c.path_loss.exponent_ap_ris},
        {"exponent_ris_user", c.path_loss.exponent_ris_user},
        {"exponent_ap_user", c.path_loss.exponent_ap_user}}},
      {"fading", c.fading == channel::Fading::rayleigh ? "rayleigh" : "los"},
      {"system",
       {{"bandwidth", c.system.bandwidth},
        {"ris_noise_power", c.system.ris_noise_power},
        {"ap_noise_power", c.system.ap_noise_power},
        {"p_circuit", c.system.p_circuit},
        {"p_dc", c.system.p_dc},
        {"p_ris_max", c.system.p_ris_max},
        {"tradeoff", c.system.tradeoff},
        {"energy_scale", c.system.energy_scale},
        {"rho_cap", c.system.rho_cap}}},
      {"user",
       {{"e_max", c.user.e_max}, {"f_max", c.user.f_max}, {"t_max", c.user.t_max}, {"kappa", c.user.kappa}, {"p_max", c.user.p_max}}},
      {"task", {{"s_bits", c.task.s_bits}, {"c_cycles", c.task.c_cycles}}},
      {"trials", c.trials},
      {"master_seed", c.master_seed},
      {"backend", c.backend},
      {"sweep", {{"parameter", c.sweep.parameter}, {"values", c.sweep.values}}},
      {"algorithms", c.algorithms},
      {"convergence", {{"l_max", c.convergence.l_max}, {"epsilon", c.convergence.epsilon}, {"sca_max", c.convergence.sca_max}}},
      {"oracle", c.oracle},
  };
}

}  // namespace hris::config
