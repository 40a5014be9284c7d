#pragma once

#include <random>

#include "hris/config.hpp"
#include "hris/validate.hpp"

namespace hris::testing {

/// Independent feasibility check of a time / energy / ratio point, written
/// from the constraint list rather than from the solver's scaled model.
inline double tp_violation(const timepower::TimePowerProblem& prob, const timepower::ConvexPoint& x) {
  double v = 0.0;
  const int K = static_cast<int>(prob.users.size());
  const double t_sum = x.t.sum();
  for (int k = 0; k < K; ++k) {
    const auto& u = prob.users[k];
    const double t = x.t[k], pb = x.p_bar[k], b = x.beta[k];
    const double e_loc = (1.0 - b) * u.c_cycles * u.kappa * u.f_local * u.f_local;
    v = std::max(v, (pb + e_loc - u.e_max) / u.e_max);
    v = std::max(v, (pb * u.amp_signal + t * u.amp_noise - t * prob.p_ris_max) / prob.p_ris_max);
    v = std::max({v, u.beta_lo - b, b - u.beta_hi, -t / u.t_max, (t - u.t_max) / u.t_max, -pb / u.e_max});
    const double bits = t > 0.0 ? t * prob.bandwidth * std::log2(1.0 + pb * u.gain / t) : 0.0;
    v = std::max(v, (b * u.s_bits - bits) / std::max(u.s_bits, 1.0));
    const double work = (1.0 - b) * u.c_cycles;
    if (work > 0.0) v = std::max(v, u.f_local > 0.0 ? (work / u.f_local - t_sum) / u.t_max : 1.0);
  }
  return v;
}

/// Default scenario constants, K users, a channel draw from `seed` and the initial
/// allocation with MMSE receive vectors.
struct Instance {
  config::ExperimentConfig cfg;
  channel::ChannelRealization rz;
  orchestrator::Problem pb;
  model::Allocation alloc;
  std::vector<model::RisState> ris;
};

inline Instance default_instance(std::uint64_t seed, int users = 2, int antennas = 8, int units = 6, int mode_bit = 0) {
  Instance in;
  in.cfg.dims = {users, antennas, units};
  in.rz = channel::sample_channels(in.cfg.geometry, in.cfg.path_loss, in.cfg.dims, seed, in.cfg.fading);
  in.pb = in.cfg.problem();
  in.alloc = model::initial_allocation(in.cfg.dims, in.pb.tasks, in.pb.users);
  in.ris = orchestrator::uniform_states(users, units, mode_bit);
  orchestrator::detail::update_beamformers(in.rz, in.ris, in.alloc, in.pb.params);
  return in;
}

/// A feasible RIS state on a default-scenario instance whose rate meets the
/// log2(SINR) form of the rate constraint, together with the allocation.
struct FeasibleCase {
  Instance in;
};

inline FeasibleCase feasible_case(std::uint64_t seed) {
  FeasibleCase fc{default_instance(seed)};
  auto& in = fc.in;
  std::mt19937_64 g(seed);
  const int K = in.cfg.dims.users, N = in.cfg.dims.units;
  for (int k = 0; k < K; ++k) {
    // energy left after computing the whole task locally, so any beta keeps C1
    const auto& u = in.pb.users[k];
    in.alloc.p[k] = (u.e_max - model::local_compute(in.pb.tasks[k], 0.0, u.f_max, u.kappa).energy) / in.alloc.t[k];
    auto s = validate::random_state(g, N, in.pb.params.rho_cap);
    // shrink amplification until the budget holds
    while (model::ris_power(s, in.alloc.p[k], in.rz.h_user_ris[k], in.pb.params).amplification > in.pb.params.p_ris_max)
      for (int n = 0; n < N; ++n) s.amplification[n] = 1.0 + 0.5 * (s.amplification[n] - 1.0);
    in.ris[k] = s;
  }
  orchestrator::detail::update_beamformers(in.rz, in.ris, in.alloc, in.pb.params);
  for (int k = 0; k < K; ++k) {
    const double gamma = model::sinr(in.rz, in.ris[k], in.alloc, in.pb.params, k);
    const double bits = in.pb.params.bandwidth * in.alloc.t[k] * std::log2(gamma);
    in.alloc.beta[k] = std::clamp(0.5 * bits / in.pb.tasks[k].s_bits, 0.0, 0.5);
  }
  return fc;
}

/// Uniform draw from the box of the time / energy / ratio variables.
inline timepower::ConvexPoint random_point(std::mt19937_64& g, const timepower::TimePowerProblem& prob) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto K = static_cast<Eigen::Index>(prob.users.size());
  timepower::ConvexPoint x{rvec(K), rvec(K), rvec(K)};
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto& us = prob.users[static_cast<std::size_t>(k)];
    x.t[k] = us.t_max * u(g);
    x.beta[k] = us.beta_lo + (us.beta_hi - us.beta_lo) * u(g);
    x.p_bar[k] = us.e_max * u(g);
  }
  return x;
}

/// Golden-section maximization of a unimodal function on [lo, hi].
template <class F>
double golden_max(F f, double lo, double hi, int iters = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++i) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - r * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + r * (b - a), fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace hris::testing
