#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hris/beamforming.hpp"
#include "hris/model.hpp"
#include "hris/sca.hpp"
#include "hris/timepower.hpp"

namespace hris::orchestrator {

using model::Allocation;
using model::RisState;

/// Everything a single solve needs besides the channels.
struct Problem {
  std::vector<model::Task> tasks;
  std::vector<model::UserParams> users;
  model::SystemParams params;
};

struct AoOptions {
  int l_max = 50;
  double epsilon = 1e-4;
  int sca_max = 10;
  sca::ModeLock lock = sca::ModeLock::free;
  double beta_lo = 0.0;
  double beta_hi = 1.0;
};

struct AoResult {
  Allocation alloc;
  std::vector<RisState> ris;
  model::CostBreakdown cost;
  std::vector<double> trace;  // cost after iteration l = 1, 2, ...
  int iterations = 0;
  bool converged = false;
  bool feasible = false;
  std::string message;
};

inline std::vector<RisState> uniform_states(int users, int units, int mode_bit) {
  return std::vector<RisState>(users, RisState::uniform(units, mode_bit));
}

/// Sets every active unit of `s` to the largest common amplification factor
/// the RIS budget allows at transmit power p, within [1, rho_cap].
inline void fill_budget(RisState& s, double p, const cvec& h_r, const model::SystemParams& params) {
  double per_rho2 = 0.0;
  for (int n = 0; n < s.units(); ++n)
    if (s.mode[n]) per_rho2 += p * std::norm(h_r[n]) + params.ris_noise_power;
  if (!(per_rho2 > 0.0)) return;
  const double rho = std::clamp(std::sqrt(params.p_ris_max / per_rho2), 1.0, params.rho_cap);
  for (int n = 0; n < s.units(); ++n)
    if (s.mode[n]) s.amplification[n] = rho;
}

namespace detail {

inline void update_beamformers(const channel::ChannelRealization& rz, const std::vector<RisState>& ris, Allocation& a,
                               const model::SystemParams& params) {
  for (int k = 0; k < a.users(); ++k) {
    // The direction does not depend on p, so any positive value works when p = 0.
    const double p = a.p[k] > 0.0 ? a.p[k] : 1.0;
    a.beamformer[k] = beamforming::mmse_beamformer(rz, ris[k], p, params, k);
  }
}

inline timepower::ConvexPoint point_of(const Allocation& a) {
  return {a.t, a.p.cwiseProduct(a.t), a.beta};
}

inline double cost_of(const channel::ChannelRealization& rz, const Allocation& a, const std::vector<RisState>& ris, const Problem& pb) {
  return model::total_cost(a, ris, rz, pb.tasks, pb.params, pb.users).total_cost;
}

inline bool feasible(const channel::ChannelRealization& rz, const Allocation& a, const std::vector<RisState>& ris, const Problem& pb) {
  return model::check_feasibility(a, ris, rz, pb.tasks, pb.params, pb.users).ok(1e-9);
}

}  // namespace detail

/// Alternating optimization: receive vectors, then time / power / offloading
/// ratio, then the RIS program with its SCA inner loop. A new iterate is only
/// accepted when it is feasible and does not raise the cost.
inline AoResult alternating_optimize(const channel::ChannelRealization& rz, const Problem& pb, const AoOptions& opt,
                                     const sca::SubproblemBackend& backend, const AoResult* start = nullptr) {
  const int K = rz.users();
  const int N = rz.units();
  AoResult res;
  Allocation a;
  std::vector<RisState> ris;
  if (start) {
    a = start->alloc;
    ris = start->ris;
  } else {
    a = model::initial_allocation({K, rz.antennas(), N}, pb.tasks, pb.users);
    ris = uniform_states(K, N, opt.lock == sca::ModeLock::all_active ? 1 : 0);
    for (int k = 0; k < K; ++k) {
      a.beta[k] = std::clamp(a.beta[k], opt.beta_lo, opt.beta_hi);
      fill_budget(ris[k], a.p[k], rz.h_user_ris[k], pb.params);
    }
  }

  bool have_point = start != nullptr && start->feasible;
  double prev = have_point ? detail::cost_of(rz, a, ris, pb) : std::numeric_limits<double>::infinity();
  res.alloc = a;
  res.ris = ris;

  for (int l = 1; l <= opt.l_max; ++l) {
    Allocation cand = have_point ? res.alloc : a;
    std::vector<RisState> cris = have_point ? res.ris : ris;

    // (i) receive beamformers
    detail::update_beamformers(rz, cris, cand, pb.params);

    // (ii) time, energy and offloading ratio
    auto prob = timepower::make_problem(rz, cris, cand, pb.tasks, pb.params, pb.users, opt.beta_lo, opt.beta_hi);
    if (have_point) prob.warm_start = detail::point_of(cand);
    const auto tp = timepower::solve_time_power(prob);
    if (!tp.feasible) {
      if (!have_point) {
        res.message = "time/power subproblem infeasible at initialization: " + tp.certificate;
        res.iterations = l;
        return res;
      }
      res.message = "time/power subproblem infeasible at iteration " + std::to_string(l) + ": " + tp.certificate;
      break;
    }
    cand.t = tp.point.t;
    cand.p = timepower::recover_power(tp.point);
    cand.beta = tp.point.beta;

    // (iii) RIS program, repeated with refreshed linearization points
    double inner_prev = detail::cost_of(rz, cand, cris, pb);
    for (int j = 0; j < opt.sca_max; ++j) {
      const auto pts = sca::points_from_state(rz, cand, cris, pb.tasks, pb.users, pb.params);
      const auto sp = sca::assemble_subproblem(rz, cand, cris, pts, pb.tasks, pb.users, pb.params, opt.lock);
      const auto out = sca::solve_and_recover(sp, backend);
      cris = out.ris;
      cand.f_local = out.f_local;
      const bool moved = std::any_of(out.slot_updated.begin(), out.slot_updated.end(), [](bool b) { return b; });
      const double now = out.objective;
      if (!moved || std::abs(inner_prev - now) <= opt.epsilon) break;
      inner_prev = now;
    }

    const double y = detail::cost_of(rz, cand, cris, pb);
    const bool ok = detail::feasible(rz, cand, cris, pb);
    res.iterations = l;
    if (ok && y <= prev) {
      const bool done = have_point && prev - y <= opt.epsilon;
      res.alloc = cand;
      res.ris = cris;
      have_point = true;
      res.trace.push_back(y);
      if (done) {
        res.converged = true;
        prev = y;
        break;
      }
      prev = y;
    } else {
      // No admissible progress: the previous point is a fixed point of the loop.
      if (have_point) {
        res.trace.push_back(prev);
        res.converged = true;
      } else {
        res.message = "no feasible point after the first iteration";
      }
      break;
    }
  }
  res.feasible = have_point;
  if (have_point) res.cost = model::total_cost(res.alloc, res.ris, rz, pb.tasks, pb.params, pb.users);
  return res;
}

enum class BaselineKind { hybrid, fully_active, fully_passive, fully_local, fully_offloading };

inline const char* baseline_name(BaselineKind k) {
  switch (k) {
    case BaselineKind::hybrid: return "hybrid";
    case BaselineKind::fully_active: return "fully_active";
    case BaselineKind::fully_passive: return "fully_passive";
    case BaselineKind::fully_local: return "fully_local";
    case BaselineKind::fully_offloading: return "fully_offloading";
  }
  return "unknown";
}

inline std::optional<BaselineKind> parse_baseline(const std::string& s) {
  for (auto k : {BaselineKind::hybrid, BaselineKind::fully_active, BaselineKind::fully_passive, BaselineKind::fully_local,
                 BaselineKind::fully_offloading})
    if (s == baseline_name(k)) return k;
  return std::nullopt;
}

/// The AO loop with the baseline's variables frozen. The hybrid scheme
/// continues from both converged pure-mode runs and keeps the cheaper result.
inline AoResult run_baseline(BaselineKind kind, const channel::ChannelRealization& rz, const Problem& pb, AoOptions opt,
                             const sca::SubproblemBackend& backend) {
  switch (kind) {
    case BaselineKind::fully_active:
      opt.lock = sca::ModeLock::all_active;
      return alternating_optimize(rz, pb, opt, backend);
    case BaselineKind::fully_passive:
      opt.lock = sca::ModeLock::all_passive;
      return alternating_optimize(rz, pb, opt, backend);
    case BaselineKind::fully_local:
      opt.beta_lo = opt.beta_hi = 0.0;
      return alternating_optimize(rz, pb, opt, backend);
    case BaselineKind::fully_offloading:
      opt.beta_lo = opt.beta_hi = 1.0;
      return alternating_optimize(rz, pb, opt, backend);
    case BaselineKind::hybrid: break;
  }
  AoOptions pure = opt;
  pure.lock = sca::ModeLock::all_active;
  const auto act = alternating_optimize(rz, pb, pure, backend);
  pure.lock = sca::ModeLock::all_passive;
  const auto pas = alternating_optimize(rz, pb, pure, backend);

  AoOptions free_opt = opt;
  free_opt.lock = sca::ModeLock::free;
  std::vector<AoResult> runs;
  for (const auto* base : {&act, &pas}) {
    if (!base->feasible) continue;
    auto cont = alternating_optimize(rz, pb, free_opt, backend, base);
    cont.trace.insert(cont.trace.begin(), base->trace.begin(), base->trace.end());
    cont.iterations += base->iterations;
    runs.push_back(std::move(cont));
  }
  if (runs.empty()) {
    // Neither pure mode is feasible: try free modes from scratch.
    return alternating_optimize(rz, pb, free_opt, backend);
  }
  auto best = std::min_element(runs.begin(), runs.end(),
                               [](const AoResult& x, const AoResult& y) { return x.cost.total_cost < y.cost.total_cost; });
  return *best;
}

// ---- brute-force oracle ---------------------------------------------------

struct OracleGrids {
  int phase_levels = 8;
  double rho_step = 0.5;
  int beta_levels = 11;
  int power_levels = 41;       // geometric, ten per decade
  double budget = 5e7;         // refuse grids with a larger census
};

struct OracleResult {
  std::vector<RisState> ris;
  Allocation alloc;
  double cost = std::numeric_limits<double>::infinity();
  bool feasible = false;
  double census = 0.0;
  long long evaluated = 0;
};

/// Number of grid points per user: 2^N L^N n_rho n_beta n_p.
inline double oracle_census(int units, const OracleGrids& g, double rho_cap) {
  const double n_rho = std::floor((rho_cap - 1.0) / g.rho_step + 1e-9) + 1.0;
  return std::pow(2.0, units) * std::pow(static_cast<double>(g.phase_levels), units) * n_rho * g.beta_levels * g.power_levels;
}

namespace detail {

/// Best time for fixed (state, beta, p) of one user with local computing
/// confined to its own slot. Returns +inf when no time is feasible.
struct TimeChoice {
  double t = 0.0;
  double f = 0.0;
  double cost = std::numeric_limits<double>::infinity();
};

inline TimeChoice best_time(double gain, double p, double beta, double p_ris, const model::Task& task, const model::UserParams& u,
                            const model::SystemParams& params, double w) {
  TimeChoice out;
  const double work = (1.0 - beta) * task.c_cycles;
  double t_lo = 0.0;
  if (beta * task.s_bits > 0.0) {
    const double r = model::rate(params, p * gain);
    if (!(r > 0.0)) return out;
    t_lo = beta * task.s_bits / r;
  }
  if (work > 0.0) t_lo = std::max(t_lo, work / u.f_max);
  double t_hi = u.t_max;
  if (t_lo > t_hi) return out;

  // C1: t p + kappa work^3 / t^2 <= E_max; convex in t.
  const double kw3 = u.kappa * work * work * work;
  auto c1 = [&](double t) { return t * p + (t > 0.0 ? kw3 / (t * t) : (kw3 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0)); };
  double t_c = t_hi;
  if (p > 0.0 && kw3 > 0.0) t_c = std::clamp(std::cbrt(2.0 * kw3 / p), t_lo, t_hi);
  else if (kw3 > 0.0) t_c = t_hi;
  else t_c = t_lo;
  if (c1(t_c) > u.e_max) return out;
  auto bisect = [&](double bad, double good) {
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (bad + good);
      (c1(mid) <= u.e_max ? good : bad) = mid;
    }
    return good;
  };
  const double lo = c1(t_lo) <= u.e_max ? t_lo : bisect(t_lo, t_c);
  const double hi = c1(t_hi) <= u.e_max ? t_hi : bisect(t_hi, t_c);

  // cost(t) = c_lin t + c_inv / t^2
  const double es = params.energy_scale;
  const double c_lin = w + (1.0 - w) * es * (p + p_ris);
  const double c_inv = (1.0 - w) * es * kw3;
  double t = lo;
  if (c_inv > 0.0 && c_lin > 0.0) t = std::clamp(std::cbrt(2.0 * c_inv / c_lin), lo, hi);
  else if (c_inv > 0.0) t = hi;
  if (!(t > 0.0) && work > 0.0) return out;
  out.t = t;
  out.f = work > 0.0 ? work / t : 0.0;
  out.cost = c_lin * t + (t > 0.0 ? c_inv / (t * t) : 0.0);
  return out;
}

}  // namespace detail

/// Exhaustive grid search for desk-scale instances. Users are searched
/// independently with local computing restricted to their own slot, which is
/// a restriction of the true feasible set.
inline OracleResult brute_force_oracle(const channel::ChannelRealization& rz, const Problem& pb, const OracleGrids& g) {
  const int K = rz.users();
  const int N = rz.units();
  const int M = rz.antennas();
  if (N > 4 || M > 2 || K > 2) throw unsupported_configuration("brute_force_oracle: requires N <= 4, M <= 2, K <= 2");
  OracleResult res;
  res.census = oracle_census(N, g, pb.params.rho_cap) * K;
  if (res.census > g.budget)
    throw std::length_error("brute_force_oracle: grid of " + std::to_string(res.census) + " points exceeds budget " +
                            std::to_string(g.budget));

  const auto& params = pb.params;
  std::vector<double> rhos;
  for (double r = 1.0; r <= params.rho_cap + 1e-9; r += g.rho_step) rhos.push_back(r);
  std::vector<double> betas;
  for (int i = 0; i < g.beta_levels; ++i) betas.push_back(g.beta_levels == 1 ? 0.0 : static_cast<double>(i) / (g.beta_levels - 1));

  res.alloc.t = rvec::Zero(K);
  res.alloc.p = rvec::Zero(K);
  res.alloc.beta = rvec::Zero(K);
  res.alloc.f_local = rvec::Zero(K);
  res.alloc.beamformer.assign(K, cvec::Zero(M));
  res.ris = uniform_states(K, N, 0);
  res.cost = 0.0;
  res.feasible = true;

  for (int k = 0; k < K; ++k) {
    const auto& task = pb.tasks.at(k);
    const auto& u = pb.users.at(k);
    const double w = params.weight(k);
    double best = std::numeric_limits<double>::infinity();
    int phase_count = 1;
    for (int n = 0; n < N; ++n) phase_count *= g.phase_levels;
    for (int mask = 0; mask < (1 << N); ++mask) {
      const bool any_active = mask != 0;
      const std::size_t n_rho = any_active ? rhos.size() : 1;
      for (int ph = 0; ph < phase_count; ++ph) {
        RisState st = RisState::uniform(N, 0);
        int code = ph;
        for (int n = 0; n < N; ++n) {
          st.mode[n] = mask >> n & 1;
          st.phase[n] = 2.0 * kPi * (code % g.phase_levels) / g.phase_levels;
          code /= g.phase_levels;
        }
        for (std::size_t ir = 0; ir < n_rho; ++ir) {
          for (int n = 0; n < N; ++n) st.amplification[n] = st.mode[n] ? rhos[ir] : 1.0;
          const cvec wv = beamforming::mmse_beamformer(rz, st, 1.0, params, k);
          const double gain = model::sinr_gain(rz, st, wv, params, k);
          const auto zero = model::ris_power(st, 0.0, rz.h_user_ris.at(k), params);
          const double amp_per_watt = model::ris_power(st, 1.0, rz.h_user_ris.at(k), params).amplification - zero.amplification;
          if (zero.amplification > params.p_ris_max) continue;
          const double p_c2 = amp_per_watt > 0.0 ? (params.p_ris_max - zero.amplification) / amp_per_watt
                                                 : std::numeric_limits<double>::infinity();
          const double p_top = std::min(p_c2, u.e_max / (1e-3 * u.t_max));
          for (double beta : betas) {
            for (int ip = 0; ip <= g.power_levels; ++ip) {
              // ip == power_levels is the p = 0 level
              const double p = ip == g.power_levels ? 0.0 : p_top * std::pow(10.0, -ip / 10.0);
              ++res.evaluated;
              const double p_ris = zero.active + zero.passive + p * amp_per_watt;
              const auto tc = detail::best_time(gain, p, beta, p_ris, task, u, params, w);
              if (tc.cost < best) {
                best = tc.cost;
                res.ris[k] = st;
                res.alloc.t[k] = tc.t;
                res.alloc.p[k] = p;
                res.alloc.beta[k] = beta;
                res.alloc.f_local[k] = tc.f;
                res.alloc.beamformer[k] = wv;
              }
            }
          }
        }
      }
    }
    if (!std::isfinite(best)) res.feasible = false;
    res.cost += best;
  }
  if (res.feasible) res.cost = model::total_cost(res.alloc, res.ris, rz, pb.tasks, pb.params, pb.users).total_cost;
  return res;
}

}  // namespace hris::orchestrator
