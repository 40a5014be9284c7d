#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "hris/channel.hpp"
#include "hris/types.hpp"

namespace hris::model {

using channel::ChannelRealization;

struct Task {
  double s_bits = 1e6;     // S_k
  double c_cycles = 4e7;   // C_k, total CPU cycles of the task
};

struct UserParams {
  double e_max = 0.01;   // J
  double f_max = 1e9;    // Hz
  double t_max = 0.5;    // s
  double kappa = 1e-28;  // effective switched capacitance
  double p_max = 0.01;   // W, used by the closed forms and the binary-offloading baselines
};

struct SystemParams {
  double bandwidth = 1e6;          // B, Hz
  double ris_noise_power = 1e-11;  // sigma^2, W
  double ap_noise_power = 1e-11;   // delta^2, W
  double p_circuit = 1e-4;         // P_C, W
  double p_dc = dbm_to_watt(-5.0); // P_DC, W
  double p_ris_max = 0.01;         // P_R^max, W
  std::vector<double> tradeoff{0.5};  // w_k; a single entry applies to every user
  double energy_scale = 1.0;       // normalizing factor of the energy term
  double rho_cap = 14.0;           // amplification factors live in [1, rho_cap]

  double weight(int k) const {
    if (tradeoff.empty()) return 0.5;
    return tradeoff.size() == 1 ? tradeoff.front() : tradeoff.at(k);
  }
};

/// Mode bits, amplification factors and phases of the N units in one time slot.
/// The per-unit reflection coefficient is rho^alpha * exp(j theta).
struct RisState {
  std::vector<int> mode;
  rvec amplification;
  rvec phase;

  static RisState uniform(int units, int mode_bit, double rho = 1.0, double theta = 0.0) {
    RisState s;
    s.mode.assign(units, mode_bit);
    s.amplification = rvec::Constant(units, rho);
    s.phase = rvec::Constant(units, theta);
    return s;
  }

  int units() const { return static_cast<int>(mode.size()); }
  int n_active() const { return static_cast<int>(std::count(mode.begin(), mode.end(), 1)); }

  cplx coefficient(int n) const {
    const double mag = mode[n] == 1 ? amplification[n] : 1.0;
    return std::polar(mag, phase[n]);
  }
  cvec coefficients() const {
    cvec out(units());
    for (int n = 0; n < units(); ++n) out[n] = coefficient(n);
    return out;
  }
  /// Diagonal of A * Lambda * Theta: the coefficient for active units, 0 for passive.
  cvec active_coefficients() const {
    cvec out(units());
    for (int n = 0; n < units(); ++n) out[n] = mode[n] == 1 ? coefficient(n) : cplx(0.0);
    return out;
  }
};

struct Allocation {
  rvec t;        // transmission time per user, s
  rvec p;        // transmit power per user, W
  rvec beta;     // offloading ratio
  rvec f_local;  // local CPU frequency, Hz
  std::vector<cvec> beamformer;  // unit-norm receive vectors

  int users() const { return static_cast<int>(t.size()); }
};

struct LocalCost {
  double time = 0.0;
  double energy = 0.0;
};

/// Local execution of the (1 - beta) share. With f = 0 and work left the time
/// is +infinity rather than an error.
inline LocalCost local_compute(const Task& task, double beta, double f, double kappa) {
  const double work = (1.0 - beta) * task.c_cycles;
  if (work <= 0.0) return {0.0, 0.0};
  if (f <= 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
  return {work / f, work * kappa * f * f};
}

/// h_d,k + H^H Lambda Theta h_r,k.
inline cvec effective_channel(const ChannelRealization& realization, const RisState& ris, int k) {
  cvec g = realization.h_direct.at(k);
  if (realization.units() == 0) return g;
  const cvec cascade = ris.coefficients().cwiseProduct(realization.h_user_ris.at(k));
  g.noalias() += realization.h_ris_ap.adjoint() * cascade;
  return g;
}

/// Signal and noise powers seen after the receive vector `w`, per watt of
/// transmit power for the signal part.
struct SinrParts {
  double signal_gain = 0.0;  // |w^H g|^2
  double ris_noise = 0.0;    // sigma^2 ||w^H H^H A Lambda Theta||^2
  double noise = 0.0;        // ris_noise + delta^2
};

inline SinrParts sinr_parts(const ChannelRealization& realization, const RisState& ris, const cvec& w,
                            const SystemParams& params, int k) {
  SinrParts parts;
  parts.signal_gain = std::norm(w.dot(effective_channel(realization, ris, k)));
  if (realization.units() > 0) {
    const cvec hw = realization.h_ris_ap * w;  // entries are conj of (w^H H^H)_n
    parts.ris_noise = params.ris_noise_power * hw.cwiseProduct(ris.active_coefficients()).squaredNorm();
  }
  parts.noise = parts.ris_noise + params.ap_noise_power;
  return parts;
}

/// Effective SINR per watt, G = |w^H g|^2 / (sigma^2 ||w^H H^H A Lambda Theta||^2 + delta^2).
inline double sinr_gain(const ChannelRealization& realization, const RisState& ris, const cvec& w,
                        const SystemParams& params, int k) {
  const auto parts = sinr_parts(realization, ris, w, params, k);
  return parts.signal_gain / parts.noise;
}

inline double sinr(const ChannelRealization& realization, const RisState& ris, const Allocation& alloc,
                   const SystemParams& params, int k) {
  return alloc.p[k] * sinr_gain(realization, ris, alloc.beamformer.at(k), params, k);
}

inline double rate(const SystemParams& params, double gamma) { return params.bandwidth * std::log2(1.0 + gamma); }

struct RisPower {
  double active = 0.0;         // N_act (P_C + P_DC) + amplification
  double passive = 0.0;        // (N - N_act) P_C
  double amplification = 0.0;  // p ||A Lambda Theta h_r||^2 + sigma^2 ||A Lambda Theta||^2
};

inline RisPower ris_power(const RisState& ris, double p, const cvec& h_r, const SystemParams& params) {
  RisPower out;
  const cvec a = ris.active_coefficients();
  const int n_act = ris.n_active();
  out.amplification = p * a.cwiseProduct(h_r).squaredNorm() + params.ris_noise_power * a.squaredNorm();
  out.active = n_act * (params.p_circuit + params.p_dc) + out.amplification;
  out.passive = (ris.units() - n_act) * params.p_circuit;
  return out;
}

struct CostBreakdown {
  double latency_sum = 0.0;
  rvec e_transmit;  // t_k p_k
  rvec e_local;
  rvec e_active;    // t_k P_k^act
  rvec e_passive;   // t_k P_k^pas
  rvec e_total;
  rvec weights;
  double energy_scale = 1.0;
  double total_cost = 0.0;
  rvec t;

  double energy_sum() const { return e_total.sum(); }

  /// Objective re-derived from the stored parts.
  double recompute() const {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < t.size(); ++k)
      acc += weights[k] * t[k] + (1.0 - weights[k]) * energy_scale * (e_transmit[k] + e_local[k] + e_active[k] + e_passive[k]);
    return acc;
  }
};

inline CostBreakdown total_cost(const Allocation& alloc, const std::vector<RisState>& ris, const ChannelRealization& realization,
                                const std::vector<Task>& tasks, const SystemParams& params,
                                const std::vector<UserParams>& users) {
  const int K = alloc.users();
  CostBreakdown c;
  c.e_transmit.resize(K);
  c.e_local.resize(K);
  c.e_active.resize(K);
  c.e_passive.resize(K);
  c.e_total.resize(K);
  c.weights.resize(K);
  c.t = alloc.t;
  c.energy_scale = params.energy_scale;
  for (int k = 0; k < K; ++k) {
    const auto power = ris_power(ris.at(k), alloc.p[k], realization.h_user_ris.at(k), params);
    c.e_transmit[k] = alloc.t[k] * alloc.p[k];
    c.e_local[k] = local_compute(tasks.at(k), alloc.beta[k], alloc.f_local[k], users.at(k).kappa).energy;
    c.e_active[k] = alloc.t[k] * power.active;
    c.e_passive[k] = alloc.t[k] * power.passive;
    c.e_total[k] = c.e_transmit[k] + c.e_local[k] + c.e_active[k] + c.e_passive[k];
    c.weights[k] = params.weight(k);
  }
  c.latency_sum = alloc.t.sum();
  c.total_cost = c.recompute();
  return c;
}

enum Constraint { C1 = 0, C2, C3, C4, C5, C6, C7, C8, kConstraintCount };

inline const char* constraint_name(int c) {
  static constexpr std::array<const char*, kConstraintCount> names{"C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8"};
  return names.at(c);
}

/// Per-user margins (positive = slack). `raw` is in natural units; `scaled`
/// divides by E_max, P_R^max, S_k, T_max or f_max as appropriate.
struct UserFeasibility {
  std::array<double, kConstraintCount> raw{};
  std::array<double, kConstraintCount> scaled{};
  double rho_range = 0.0;  // min over active units of (rho - 1, rho_cap - rho)
};

struct FeasibilityReport {
  std::vector<UserFeasibility> users;

  double worst(int c) const {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& u : users) w = std::min(w, u.scaled[c]);
    return w;
  }
  bool ok(double tol = 1e-9) const {
    for (const auto& u : users) {
      for (double m : u.scaled)
        if (!(m >= -tol)) return false;
      if (!(u.rho_range >= -tol)) return false;
    }
    return true;
  }
  /// "user k: Cx" for the first violated constraint, empty when feasible.
  std::string first_violation(double tol = 1e-9) const {
    for (std::size_t k = 0; k < users.size(); ++k) {
      for (int c = 0; c < kConstraintCount; ++c)
        if (!(users[k].scaled[c] >= -tol)) return "user " + std::to_string(k) + ": " + constraint_name(c);
      if (!(users[k].rho_range >= -tol)) return "user " + std::to_string(k) + ": amplification range";
    }
    return {};
  }
};

inline FeasibilityReport check_feasibility(const Allocation& alloc, const std::vector<RisState>& ris,
                                           const ChannelRealization& realization, const std::vector<Task>& tasks,
                                           const SystemParams& params, const std::vector<UserParams>& users) {
  const int K = alloc.users();
  const double t_sum = alloc.t.sum();
  FeasibilityReport rep;
  rep.users.resize(K);
  for (int k = 0; k < K; ++k) {
    auto& m = rep.users[k];
    const auto& up = users.at(k);
    const auto& task = tasks.at(k);
    const auto& state = ris.at(k);
    const auto local = local_compute(task, alloc.beta[k], alloc.f_local[k], up.kappa);
    const auto power = ris_power(state, alloc.p[k], realization.h_user_ris.at(k), params);

    m.raw[C1] = up.e_max - (alloc.t[k] * alloc.p[k] + local.energy);
    m.scaled[C1] = m.raw[C1] / up.e_max;

    m.raw[C2] = params.p_ris_max - power.amplification;
    m.scaled[C2] = m.raw[C2] / params.p_ris_max;

    m.raw[C3] = std::min(alloc.beta[k], 1.0 - alloc.beta[k]);
    m.scaled[C3] = m.raw[C3];

    const double r = rate(params, sinr(realization, state, alloc, params, k));
    m.raw[C4] = alloc.t[k] * r - alloc.beta[k] * task.s_bits;
    m.scaled[C4] = m.raw[C4] / std::max(task.s_bits, 1.0);

    double c5 = 0.0;
    for (int bit : state.mode)
      if (bit != 0 && bit != 1) c5 = -1.0;
    m.raw[C5] = m.scaled[C5] = c5;

    const double c6_local = t_sum - local.time;
    const double c6_slot = up.t_max - alloc.t[k];
    m.raw[C6] = std::min(c6_local, c6_slot);
    m.scaled[C6] = m.raw[C6] / up.t_max;

    m.raw[C7] = std::min(alloc.f_local[k], up.f_max - alloc.f_local[k]);
    m.scaled[C7] = m.raw[C7] / up.f_max;

    double c8 = 0.0;
    double rho_range = std::numeric_limits<double>::infinity();
    for (int n = 0; n < state.units(); ++n) {
      if (state.mode[n] == 0) {
        c8 = std::min(c8, -std::abs(std::abs(state.coefficient(n)) - 1.0));
      } else {
        rho_range = std::min({rho_range, state.amplification[n] - 1.0, params.rho_cap - state.amplification[n]});
      }
    }
    m.raw[C8] = m.scaled[C8] = c8;
    m.rho_range = rho_range;
  }
  return rep;
}

/// Starting point of the alternating optimization: given modes, theta = 0,
/// rho = 1, beta = 0.5, f = f_max, t = T_max / 2 and p from C1 with equality.
inline Allocation initial_allocation(const Dimensions& dims, const std::vector<Task>& tasks,
                                     const std::vector<UserParams>& users) {
  Allocation a;
  const int K = dims.users;
  a.t.resize(K);
  a.p.resize(K);
  a.beta = rvec::Constant(K, 0.5);
  a.f_local.resize(K);
  for (int k = 0; k < K; ++k) {
    const auto& up = users.at(k);
    a.f_local[k] = up.f_max;
    a.t[k] = up.t_max / 2.0;
    const double e_loc = local_compute(tasks.at(k), a.beta[k], a.f_local[k], up.kappa).energy;
    a.p[k] = std::max(0.0, (up.e_max - e_loc) / a.t[k]);
    cvec w = cvec::Zero(dims.antennas);
    w[0] = 1.0;
    a.beamformer.push_back(w);
  }
  return a;
}

}  // namespace hris::model
