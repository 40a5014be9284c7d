#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hris/model.hpp"

// Single-antenna, RIS-only link with a common amplification factor, element
// gains replaced by their minima, and the user transmitting at P_max.
namespace hris::closedform {

struct ConservativeChannel {
  double g_ris_ap = 0.0;    // |h|
  double g_user_ris = 0.0;  // |h_r|
};

inline ConservativeChannel from_min_gains(const channel::MinGains& g) { return {g.ris_ap, g.user_ris}; }

inline double wrap_phase(double x) {
  x = std::fmod(x, 2.0 * kPi);
  return x < 0.0 ? x + 2.0 * kPi : x;
}

/// theta_n = arg(h_n) - arg(h_r,n), wrapped to [0, 2 pi).
inline rvec aligned_phases(const cvec& h, const cvec& h_r) {
  if (h.size() != h_r.size()) throw std::invalid_argument("aligned_phases: length mismatch");
  rvec th(h.size());
  for (Eigen::Index n = 0; n < h.size(); ++n) th[n] = wrap_phase(std::arg(h[n]) - std::arg(h_r[n]));
  return th;
}

/// P |h|^2 |h_r|^2 (n rho + N - n)^2 / (sigma^2 |h|^2 n rho^2 + delta^2).
inline double conservative_sinr(const ConservativeChannel& cc, double n_act, double rho, double p, const model::SystemParams& params,
                                int units) {
  const double h2 = cc.g_ris_ap * cc.g_ris_ap;
  const double hr2 = cc.g_user_ris * cc.g_user_ris;
  const double amp = n_act * rho + units - n_act;
  return p * h2 * hr2 * amp * amp / (params.ris_noise_power * h2 * n_act * rho * rho + params.ap_noise_power);
}

/// Amplification power of n active units at common factor rho.
inline double amplification_power(const ConservativeChannel& cc, double n_act, double rho, double p, const model::SystemParams& params) {
  return (p * cc.g_user_ris * cc.g_user_ris + params.ris_noise_power) * n_act * rho * rho;
}

/// Largest common factor allowed by the RIS power budget,
/// sqrt(P_R / ((P |h_r|^2 + sigma^2) n)).
inline double rho_upper(const ConservativeChannel& cc, double n_act, double p, const model::SystemParams& params) {
  return std::sqrt(params.p_ris_max / ((p * cc.g_user_ris * cc.g_user_ris + params.ris_noise_power) * n_act));
}

/// Latency-optimal amplification factor: the budget is spent in full.
inline double latency_amp(const ConservativeChannel& cc, double n_act, double p, const model::SystemParams& params) {
  if (!(n_act > 0.0)) throw domain_error("latency_amp: requires at least one active unit");
  return rho_upper(cc, n_act, p, params);
}

struct ClosedFormOptions {
  bool cap_rho = false;  // clamp rho to [1, rho_cap] and re-check the budget
};

// ---- latency ------------------------------------------------------------

/// Helpers of the active-count analysis: f(x) = A1 (A2 x - x^2 + N)^2 with x = sqrt(n).
struct CountAnalysis {
  double a1 = 0.0;
  double a2 = 0.0;
  double x1 = 0.0, x2 = 0.0, x3 = 0.0;
  int units = 0;

  double f(double x) const {
    const double v = a2 * x - x * x + units;
    return a1 * v * v;
  }
  double df(double x) const { return 2.0 * a1 * (a2 * x - x * x + units) * (a2 - 2.0 * x); }
  /// f(x2) - f(sqrt(N)) in factored form.
  double gap_factored() const {
    const double s = std::sqrt(static_cast<double>(units));
    return a1 * (a2 / 2.0 - s) * (a2 / 2.0 - s) * (a2 * a2 / 4.0 + units + a2 * s);
  }
};

inline CountAnalysis count_analysis(const ConservativeChannel& cc, double p, const model::SystemParams& params, int units) {
  const double h2 = cc.g_ris_ap * cc.g_ris_ap;
  const double hr2 = cc.g_user_ris * cc.g_user_ris;
  const double q = p * hr2 + params.ris_noise_power;
  CountAnalysis a;
  a.units = units;
  a.a1 = p * h2 * hr2 / (params.ris_noise_power * h2 * params.p_ris_max / q + params.ap_noise_power);
  a.a2 = std::sqrt(params.p_ris_max / q);
  const double root = std::sqrt(a.a2 * a.a2 + 4.0 * units);
  a.x1 = (a.a2 - root) / 2.0;
  a.x2 = a.a2 / 2.0;
  a.x3 = (a.a2 + root) / 2.0;
  return a;
}

/// SINR with rho at its latency optimum for a continuous count n (0 < n <= N).
inline double latency_objective(const ConservativeChannel& cc, double n_act, double p, const model::SystemParams& params, int units) {
  return count_analysis(cc, p, params, units).f(std::sqrt(n_act));
}

/// Channel threshold below which every unit should be active.
inline double active_threshold(double p, const model::SystemParams& params, int units) {
  const double v = params.p_ris_max / (4.0 * units * p) - params.ris_noise_power / p;
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

struct LatencySolution {
  int n_act = 0;
  int n_pas = 0;
  double n_act_continuous = 0.0;
  double rho = 1.0;
  double sinr = 0.0;
  double t = std::numeric_limits<double>::infinity();
  bool feasible = false;
  bool budget_ok = true;  // only false when the cap option lifts rho above the budget
};

/// SINR of an integer count with the latency-optimal factor (rho = 1 for n = 0).
inline double latency_sinr_at(const ConservativeChannel& cc, int n_act, double p, const model::SystemParams& params, int units,
                              const ClosedFormOptions& opt, double* rho_out = nullptr, bool* budget_ok = nullptr) {
  double rho = 1.0;
  bool ok = true;
  if (n_act > 0) {
    rho = latency_amp(cc, n_act, p, params);
    if (opt.cap_rho) {
      rho = std::clamp(rho, 1.0, params.rho_cap);
      ok = amplification_power(cc, n_act, rho, p, params) <= params.p_ris_max * (1.0 + 1e-12);
    }
  }
  if (rho_out) *rho_out = rho;
  if (budget_ok) *budget_ok = ok;
  return conservative_sinr(cc, n_act, rho, p, params, units);
}

/// Active/passive split maximizing the SINR. The continuous optimum is rounded
/// by comparing the SINR at its floor and ceiling within [0, N].
inline LatencySolution latency_count(const ConservativeChannel& cc, double p, const model::SystemParams& params, int units,
                                     const ClosedFormOptions& opt = {}) {
  if (!(params.p_ris_max > 4.0 * units * params.ris_noise_power))
    throw unsupported_configuration("latency_count: RIS budget must exceed 4 N sigma^2");
  LatencySolution s;
  const double q = p * cc.g_user_ris * cc.g_user_ris + params.ris_noise_power;
  if (cc.g_user_ris <= active_threshold(p, params, units)) {
    s.n_act_continuous = units;
  } else {
    s.n_act_continuous = params.p_ris_max / (4.0 * q);
  }
  const int lo = std::clamp(static_cast<int>(std::floor(s.n_act_continuous)), 0, units);
  const int hi = std::clamp(static_cast<int>(std::ceil(s.n_act_continuous)), 0, units);
  double rho_lo = 1.0, rho_hi = 1.0;
  bool ok_lo = true, ok_hi = true;
  const double g_lo = latency_sinr_at(cc, lo, p, params, units, opt, &rho_lo, &ok_lo);
  const double g_hi = latency_sinr_at(cc, hi, p, params, units, opt, &rho_hi, &ok_hi);
  const bool take_hi = (ok_hi && !ok_lo) || (ok_hi == ok_lo && g_hi > g_lo);
  s.n_act = take_hi ? hi : lo;
  s.rho = take_hi ? rho_hi : rho_lo;
  s.sinr = take_hi ? g_hi : g_lo;
  s.budget_ok = take_hi ? ok_hi : ok_lo;
  s.n_pas = units - s.n_act;
  return s;
}

/// t = S / (B log2(1 + gamma)); feasible iff t <= T_max.
inline LatencySolution latency_time(LatencySolution s, const model::Task& task, const model::UserParams& user,
                                    const model::SystemParams& params) {
  if (!(s.sinr > 0.0)) {
    s.t = std::numeric_limits<double>::infinity();
    s.feasible = false;
    return s;
  }
  s.t = task.s_bits / model::rate(params, s.sinr);
  s.feasible = s.t <= user.t_max && s.budget_ok;
  return s;
}

// ---- energy -------------------------------------------------------------

enum class EnergyVerdict {
  feasible,
  time_exceeds_limit,      // t^L > T_max
  amp_no_root,             // discriminant negative or rho_min above r2
  amp_bounds_crossed,      // rho_L > rho_U
  count_condition_failed,  // denominator of N^D not positive
  count_bounds_crossed,    // N^D > N^U
  degenerate_input,        // e.g. rho = 1 or zero SINR
};

inline const char* verdict_name(EnergyVerdict v) {
  switch (v) {
    case EnergyVerdict::feasible: return "feasible";
    case EnergyVerdict::time_exceeds_limit: return "infeasible: transmission-time lower bound exceeds T_max";
    case EnergyVerdict::amp_no_root: return "infeasible per sufficient condition: no amplification root above rho_min";
    case EnergyVerdict::amp_bounds_crossed: return "infeasible: amplification lower bound exceeds budget bound";
    case EnergyVerdict::count_condition_failed: return "infeasible per sufficient condition: active-count bound undefined";
    case EnergyVerdict::count_bounds_crossed: return "infeasible: active-count lower bound exceeds upper bound";
    case EnergyVerdict::degenerate_input: return "infeasible: degenerate input";
  }
  return "unknown";
}

/// 2^{S/(t B)} - 1.
inline double required_sinr(const model::Task& task, double t, const model::SystemParams& params) {
  return std::expm1(task.s_bits * kLn2 / (t * params.bandwidth));
}

/// t (P + (P |h_r|^2 + sigma^2) n rho^2 + N P_C + n P_DC).
inline double energy_objective(const ConservativeChannel& cc, double n_act, double rho, double t, double p,
                               const model::SystemParams& params, int units) {
  return t * (p + amplification_power(cc, n_act, rho, p, params) + units * params.p_circuit + n_act * params.p_dc);
}

struct TimeResult {
  double t = std::numeric_limits<double>::infinity();
  EnergyVerdict verdict = EnergyVerdict::degenerate_input;
};

inline TimeResult energy_time(const ConservativeChannel& cc, double n_act, double rho, const model::Task& task,
                              const model::UserParams& user, const model::SystemParams& params, int units) {
  const double g = conservative_sinr(cc, n_act, rho, user.p_max, params, units);
  if (!(g > 0.0)) return {};
  TimeResult r;
  r.t = task.s_bits / model::rate(params, g);
  r.verdict = r.t <= user.t_max ? EnergyVerdict::feasible : EnergyVerdict::time_exceeds_limit;
  return r;
}

struct AmpResult {
  double rho = std::numeric_limits<double>::quiet_NaN();
  double r1 = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  double rho_lower = std::numeric_limits<double>::quiet_NaN();
  double rho_upper = std::numeric_limits<double>::quiet_NaN();
  double b = 0.0;
  double s_hat = 0.0;
  double c4_margin = std::numeric_limits<double>::quiet_NaN();  // direct evaluation, relative
  EnergyVerdict verdict = EnergyVerdict::degenerate_input;
};

/// Smallest common factor meeting the rate requirement through the 4ab bound,
/// checked against the budget bound.
inline AmpResult energy_amp(const ConservativeChannel& cc, int n_act, const model::Task& task, double t,
                            const model::UserParams& user, const model::SystemParams& params, int units, double rho_min = 1.0,
                            const ClosedFormOptions& opt = {}) {
  AmpResult r;
  if (n_act <= 0 || !(t > 0.0)) return r;
  const double p = user.p_max;
  const double h2 = cc.g_ris_ap * cc.g_ris_ap;
  const double hr2 = cc.g_user_ris * cc.g_user_ris;
  r.s_hat = required_sinr(task, t, params);
  r.b = 4.0 * p * h2 * hr2 * n_act * (units - n_act);
  r.rho_upper = rho_upper(cc, n_act, p, params);
  if (opt.cap_rho) r.rho_upper = std::min(r.rho_upper, params.rho_cap);
  const double a = params.ris_noise_power * h2 * n_act * r.s_hat;
  const double disc = r.b * r.b - 4.0 * params.ris_noise_power * params.ap_noise_power * h2 * n_act * r.s_hat * r.s_hat;
  if (r.b <= 0.0 || !(a > 0.0) || disc < 0.0) {
    r.verdict = EnergyVerdict::amp_no_root;
    return r;
  }
  r.r2 = (r.b + std::sqrt(disc)) / (2.0 * a);
  r.r1 = params.ap_noise_power * r.s_hat / (a * r.r2);  // product of roots, avoids cancellation
  if (rho_min > r.r2) {
    r.verdict = EnergyVerdict::amp_no_root;
    return r;
  }
  r.rho_lower = std::max(r.r1, rho_min);
  if (r.rho_lower > r.rho_upper) {
    r.verdict = EnergyVerdict::amp_bounds_crossed;
    return r;
  }
  r.rho = r.rho_lower;
  r.c4_margin = conservative_sinr(cc, n_act, r.rho, p, params, units) / r.s_hat - 1.0;
  r.verdict = EnergyVerdict::feasible;
  return r;
}

struct CountResult {
  int n_act = 0;
  double n_lower = std::numeric_limits<double>::quiet_NaN();  // N^D
  double n_upper = std::numeric_limits<double>::quiet_NaN();  // N^U
  double s_hat = 0.0;
  EnergyVerdict verdict = EnergyVerdict::degenerate_input;
};

/// Smallest active count meeting the rate requirement through the 4ab bound,
/// rounded up, checked against the budget bound.
inline CountResult energy_count(const ConservativeChannel& cc, double rho, const model::Task& task, double t,
                                const model::UserParams& user, const model::SystemParams& params, int units) {
  if (!(rho > 1.0)) throw domain_error("energy_count: requires rho > 1");
  CountResult r;
  if (!(t > 0.0)) return r;
  const double p = user.p_max;
  const double h2 = cc.g_ris_ap * cc.g_ris_ap;
  const double hr2 = cc.g_user_ris * cc.g_user_ris;
  r.s_hat = required_sinr(task, t, params);
  r.n_upper = std::min(params.p_ris_max / ((p * hr2 + params.ris_noise_power) * rho * rho), static_cast<double>(units));
  if (!(4.0 * p * hr2 * (rho - 1.0) * units > params.ris_noise_power * rho * rho * r.s_hat)) {
    r.verdict = EnergyVerdict::count_condition_failed;
    return r;
  }
  const double den = 4.0 * p * h2 * hr2 * (rho - 1.0) * units - params.ris_noise_power * h2 * rho * rho * r.s_hat;
  r.n_lower = params.ap_noise_power * r.s_hat / den;
  r.n_act = static_cast<int>(std::ceil(r.n_lower - 1e-12));
  if (r.n_act > r.n_upper) {
    r.verdict = EnergyVerdict::count_bounds_crossed;
    return r;
  }
  r.verdict = EnergyVerdict::feasible;
  return r;
}

struct EnergySolution {
  double t = std::numeric_limits<double>::infinity();
  double rho = 1.0;
  int n_act = 0;
  double energy = std::numeric_limits<double>::infinity();
  double c4_margin = std::numeric_limits<double>::quiet_NaN();
  int rounds = 0;
  EnergyVerdict verdict = EnergyVerdict::degenerate_input;
};

/// Alternates the time, amplification and count rules from a start count
/// until the triple stops changing. The start factor is where the 4ab bound
/// is tight, n rho = N - n, clipped to the budget bound.
inline EnergySolution solve_energy(const ConservativeChannel& cc, int n_start, const model::Task& task, const model::UserParams& user,
                                   const model::SystemParams& params, int units, double rho_min = 1.0, const ClosedFormOptions& opt = {},
                                   int max_rounds = 50) {
  EnergySolution s;
  if (n_start <= 0 || n_start >= units) return s;
  int n = n_start;
  double rho = rho_upper(cc, n, user.p_max, params);
  if (opt.cap_rho) rho = std::min(rho, params.rho_cap);
  rho = std::clamp(static_cast<double>(units - n) / n, std::max(rho_min, 1.0), std::max(rho, 1.0));
  for (s.rounds = 1; s.rounds <= max_rounds; ++s.rounds) {
    const auto tr = energy_time(cc, n, rho, task, user, params, units);
    if (tr.verdict != EnergyVerdict::feasible) {
      s.verdict = tr.verdict;
      return s;
    }
    const auto ar = energy_amp(cc, n, task, tr.t, user, params, units, rho_min, opt);
    if (ar.verdict != EnergyVerdict::feasible) {
      s.verdict = ar.verdict;
      return s;
    }
    if (!(ar.rho > 1.0)) {
      // Amplification brings nothing here; the count rule is undefined at rho = 1.
      s = {tr.t, ar.rho, n, energy_objective(cc, n, ar.rho, tr.t, user.p_max, params, units), ar.c4_margin, s.rounds,
           EnergyVerdict::feasible};
      return s;
    }
    const auto cr = energy_count(cc, ar.rho, task, tr.t, user, params, units);
    if (cr.verdict != EnergyVerdict::feasible) {
      s.verdict = cr.verdict;
      return s;
    }
    const int n_next = std::clamp(cr.n_act, 1, units - 1);
    const bool stable = n_next == n && std::abs(ar.rho - rho) <= 1e-12 * rho;
    n = n_next;
    rho = ar.rho;
    if (stable) break;
  }
  const auto tr = energy_time(cc, n, rho, task, user, params, units);
  s.t = tr.t;
  s.rho = rho;
  s.n_act = n;
  s.verdict = tr.verdict;
  s.energy = energy_objective(cc, n, rho, tr.t, user.p_max, params, units);
  s.c4_margin = conservative_sinr(cc, n, rho, user.p_max, params, units) / required_sinr(task, tr.t, params) - 1.0;
  return s;
}

}  // namespace hris::closedform
