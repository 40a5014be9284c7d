#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hris/model.hpp"

namespace hris::sca {

using model::RisState;

/// Previous-iterate values around which the first-order bounds are built.
struct LinearizationPoint {
  rvec alpha_bar;
  cvec u_bar;   // N
  cvec o_bar;   // N + 1
  double v_bar = 0.0;
};

/// Lifted variables of one slot. `u` satisfies conj(u_n) = alpha_n * theta_bar_n,
/// `o` = [theta_bar; 1] with theta_bar_n = rho_n^alpha_n exp(j theta_n).
struct LiftedVars {
  cmat U;
  cvec u;
  cmat O;
  cvec o;
  double sig_exp = 0.0;
  double noise_exp = 0.0;
  rvec alpha;
  double f_local = 0.0;
};

/// H W H^H = sum_m chi_m p_m q_m^H.
struct SvdNoiseForm {
  rvec chi;
  cmat left;   // columns p_m
  cmat right;  // columns q_m
};

// ---- first-order bounds ---------------------------------------------------

/// abar^2 + 2 abar (a - abar) <= a^2.
inline double binary_taylor(double a, double abar) { return abar * abar + 2.0 * abar * (a - abar); }

/// -||vbar||^2 + 2 Re(vbar^H v) <= ||v||^2.
inline double trace_taylor(const cvec& v, const cvec& vbar) { return -vbar.squaredNorm() + 2.0 * vbar.dot(v).real(); }

/// e^vbar (v - vbar + 1) <= e^v.
inline double exp_taylor(double v, double vbar) { return std::exp(vbar) * (v - vbar + 1.0); }

// ---- noise term via SVD ---------------------------------------------------

inline SvdNoiseForm svd_noise_form(const cmat& H, const cvec& w) {
  const cvec hw = H * w;
  const cmat M = hw * hw.adjoint();
  Eigen::JacobiSVD<cmat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

inline cmat reconstruct(const SvdNoiseForm& form) {
  return form.left * form.chi.cast<cplx>().asDiagonal() * form.right.adjoint();
}

/// Tr(sum_m chi_m diag(p_m) U diag(q_m^H)); linear in U.
inline double noise_trace(const SvdNoiseForm& form, const cmat& U) {
  cplx acc = 0.0;
  for (Eigen::Index m = 0; m < form.chi.size(); ++m)
    for (Eigen::Index n = 0; n < U.rows(); ++n) acc += form.chi[m] * form.left(n, m) * U(n, n) * std::conj(form.right(n, m));
  return acc.real();
}

// ---- constraint rows ------------------------------------------------------

enum class RowKind { linear, second_order, psd, exponential };

/// One scalar constraint of the lifted program. `margin` >= 0 means satisfied;
/// margins are scaled to be dimensionless.
struct ConstraintRow {
  std::string name;
  int slot = 0;
  RowKind kind = RowKind::linear;
  std::function<double(const LiftedVars&)> margin;
};

/// Fixed data of slot k during the RIS step.
struct SlotData {
  int k = 0;
  int units = 0;
  double t = 0.0, p = 0.0, beta = 0.0, t_sum = 0.0;
  double weight = 0.5;
  double s_bits = 0.0, c_cycles = 0.0, kappa = 0.0, e_max = 0.0, t_max = 0.0, f_max = 0.0;
  cvec w;
  cvec h_r;
  cmat H;   // N x M
  cmat Hk;  // M x (N+1): [H^H diag(h_r), h_d]
  SvdNoiseForm noise;
  model::SystemParams params;
};

/// C5a linearized plus the C5b box.
inline std::vector<ConstraintRow> relax_binary(int slot, int n, const LinearizationPoint& point) {
  const double abar = point.alpha_bar[n];
  if (!(abar >= 0.0 && abar <= 1.0)) throw std::invalid_argument("relax_binary: alpha_bar outside [0,1]");
  const std::string tag = "[" + std::to_string(n) + "]";
  return {
      {"C5a" + tag, slot, RowKind::linear, [n, abar](const LiftedVars& x) { return binary_taylor(x.alpha[n], abar) - x.alpha[n]; }},
      {"C5b.lo" + tag, slot, RowKind::linear, [n](const LiftedVars& x) { return x.alpha[n]; }},
      {"C5b.hi" + tag, slot, RowKind::linear, [n](const LiftedVars& x) { return 1.0 - x.alpha[n]; }},
  };
}

/// Interval for one real part of conj(u_n) implied by C9a-C9d.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

inline Interval big_m_box(double theta_part, double alpha, double rho_max) {
  return {std::max(theta_part - (1.0 - alpha) * rho_max, -alpha * rho_max),
          std::min(theta_part + (1.0 - alpha) * rho_max, alpha * rho_max)};
}

/// C9a-C9d on the real and imaginary parts, coupling conj(u_n) with theta_bar_n = o_n.
inline std::vector<ConstraintRow> big_m_couple(int slot, int n, double rho_max, double rho_cap) {
  if (!(rho_max >= rho_cap)) throw std::invalid_argument("big_m_couple: rho_max is smaller than the attainable |theta_bar|");
  std::vector<ConstraintRow> rows;
  const std::string tag = "[" + std::to_string(n) + "]";
  for (int part = 0; part < 2; ++part) {
    const std::string p = part == 0 ? ".re" : ".im";
    auto get = [part](cplx z) { return part == 0 ? z.real() : z.imag(); };
    const double M = rho_max;
    rows.push_back({"C9a" + p + tag, slot, RowKind::linear, [=](const LiftedVars& x) {
                      return get(std::conj(x.u[n])) - (get(x.o[n]) - (1.0 - x.alpha[n]) * M);
                    }});
    rows.push_back({"C9b" + p + tag, slot, RowKind::linear, [=](const LiftedVars& x) {
                      return get(x.o[n]) + (1.0 - x.alpha[n]) * M - get(std::conj(x.u[n]));
                    }});
    rows.push_back({"C9c" + p + tag, slot, RowKind::linear,
                    [=](const LiftedVars& x) { return get(std::conj(x.u[n])) + x.alpha[n] * M; }});
    rows.push_back({"C9d" + p + tag, slot, RowKind::linear,
                    [=](const LiftedVars& x) { return x.alpha[n] * M - get(std::conj(x.u[n])); }});
  }
  return rows;
}

/// Smallest eigenvalue of [[X, x], [x^H, 1]] relative to its size.
inline double schur_margin(const cmat& X, const cvec& x) {
  const Eigen::Index n = X.rows();
  cmat B(n + 1, n + 1);
  B.topLeftCorner(n, n) = X;
  B.topRightCorner(n, 1) = x;
  B.bottomLeftCorner(1, n) = x.adjoint();
  B(n, n) = 1.0;
  Eigen::SelfAdjointEigenSolver<cmat> es(B, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() / std::max(1.0, B.trace().real());
}

/// C10a / C10b-bar for (U, u), or C10c / C10d-bar for (O, o).
inline std::vector<ConstraintRow> psd_lift(int slot, bool over_o, const LinearizationPoint& point) {
  const cvec vbar = over_o ? point.o_bar : point.u_bar;
  if (!vbar.allFinite()) throw std::invalid_argument("psd_lift: non-finite linearization point");
  const double scale = std::max(1.0, vbar.squaredNorm());
  if (over_o)
    return {{"C10c", slot, RowKind::psd, [](const LiftedVars& x) { return schur_margin(x.O, x.o); }},
            {"C10d", slot, RowKind::linear,
             [vbar, scale](const LiftedVars& x) { return (trace_taylor(x.o, vbar) - x.O.trace().real()) / scale; }}};
  return {{"C10a", slot, RowKind::psd, [](const LiftedVars& x) { return schur_margin(x.U, x.u); }},
          {"C10b", slot, RowKind::linear,
           [vbar, scale](const LiftedVars& x) { return (trace_taylor(x.u, vbar) - x.U.trace().real()) / scale; }}};
}

inline double signal_power(const SlotData& s, const cmat& O) {
  // p Tr(W H_k O H_k^H) = p w^H H_k O H_k^H w
  const cvec a = s.Hk.adjoint() * s.w;
  return s.p * a.dot(O * a).real();
}

inline double noise_power(const SlotData& s, const cmat& U) {
  return s.params.ris_noise_power * noise_trace(s.noise, U) + s.params.ap_noise_power;
}

/// C4a, C4b-bar and the rate constraint of the lifted program.
inline std::vector<ConstraintRow> exp_slack_constraints(const std::shared_ptr<const SlotData>& s, const LinearizationPoint& point) {
  if (!std::isfinite(point.v_bar)) throw std::invalid_argument("exp_slack_constraints: non-finite v_bar");
  const double vbar = point.v_bar;
  return {
      {"C4a", s->k, RowKind::exponential,
       [s](const LiftedVars& x) {
         const double e = std::exp(x.sig_exp);
         return (signal_power(*s, x.O) - e) / std::max(e, std::numeric_limits<double>::min());
       }},
      {"C4b", s->k, RowKind::linear,
       [s, vbar](const LiftedVars& x) {
         const double noise = noise_power(*s, x.U);
         return (exp_taylor(x.noise_exp, vbar) - noise) / noise;
       }},
      {"C4", s->k, RowKind::linear,
       [s](const LiftedVars& x) {
         return (s->params.bandwidth * s->t * (x.sig_exp - x.noise_exp) / kLn2 - s->beta * s->s_bits) / std::max(s->s_bits, 1.0);
       }},
  };
}

/// |O_{n,N+1} - conj(u_n)| <= 1 - alpha_n.
inline std::vector<ConstraintRow> relaxed_unit_modulus(int slot, int n) {
  return {{"C8[" + std::to_string(n) + "]", slot, RowKind::second_order, [n](const LiftedVars& x) {
             const auto N = x.O.rows() - 1;
             return (1.0 - x.alpha[n]) - std::abs(x.O(n, N) - std::conj(x.u[n]));
           }}};
}

// ---- program --------------------------------------------------------------

enum class ModeLock { free, all_active, all_passive };

struct Subproblem {
  const channel::ChannelRealization* realization = nullptr;
  model::Allocation alloc;
  std::vector<RisState> input_state;
  std::vector<model::Task> tasks;
  std::vector<model::UserParams> users;
  model::SystemParams params;
  ModeLock lock = ModeLock::free;
  double rho_max = 28.0;

  std::vector<std::shared_ptr<const SlotData>> slots;
  std::vector<LinearizationPoint> points;
  std::vector<ConstraintRow> rows;

  /// Objective of one slot: w t + (1 - w) energy_scale E_bar.
  double slot_objective(int k, const LiftedVars& x) const {
    const auto& s = *slots.at(k);
    const auto& pr = s.params;
    double amp = 0.0;
    for (int n = 0; n < s.units; ++n) amp += std::norm(s.h_r[n]) * x.U(n, n).real();
    amp = s.p * amp + pr.ris_noise_power * x.U.trace().real();
    const double n_act = x.alpha.sum();
    const double e_loc = (1.0 - s.beta) * s.c_cycles * s.kappa * x.f_local * x.f_local;
    const double energy = s.t * s.p + e_loc + s.t * (n_act * (pr.p_circuit + pr.p_dc) + amp) + s.t * (s.units - n_act) * pr.p_circuit;
    return s.weight * s.t + (1.0 - s.weight) * pr.energy_scale * energy;
  }

  double objective(const std::vector<LiftedVars>& x) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < slots.size(); ++k) acc += slot_objective(static_cast<int>(k), x[k]);
    return acc;
  }

  /// Smallest margin over all rows; the name of that row is written to `which`.
  double min_margin(const std::vector<LiftedVars>& x, std::string* which = nullptr) const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      const double m = r.margin(x.at(r.slot));
      if (!(m >= worst)) {
        worst = m;
        if (which) *which = "slot " + std::to_string(r.slot) + ": " + r.name;
      }
    }
    return worst;
  }

  std::size_t row_count(int slot) const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [slot](const ConstraintRow& r) { return r.slot == slot; }));
  }
};

/// Number of scalar rows per slot for N units.
inline std::size_t census_per_slot(int units) { return 12u * static_cast<std::size_t>(units) + 13u; }

inline std::shared_ptr<const SlotData> make_slot(const channel::ChannelRealization& realization, const model::Allocation& alloc,
                                                 const std::vector<model::Task>& tasks, const std::vector<model::UserParams>& users,
                                                 const model::SystemParams& params, int k) {
  auto s = std::make_shared<SlotData>();
  s->k = k;
  s->units = realization.units();
  s->t = alloc.t[k];
  s->p = alloc.p[k];
  s->beta = alloc.beta[k];
  s->t_sum = alloc.t.sum();
  s->weight = params.weight(k);
  s->s_bits = tasks.at(k).s_bits;
  s->c_cycles = tasks.at(k).c_cycles;
  s->kappa = users.at(k).kappa;
  s->e_max = users.at(k).e_max;
  s->t_max = users.at(k).t_max;
  s->f_max = users.at(k).f_max;
  s->w = alloc.beamformer.at(k);
  s->h_r = realization.h_user_ris.at(k);
  s->H = realization.h_ris_ap;
  const int N = s->units;
  const int M = realization.antennas();
  s->Hk.resize(M, N + 1);
  s->Hk.leftCols(N) = realization.h_ris_ap.adjoint() * s->h_r.asDiagonal();
  s->Hk.col(N) = realization.h_direct.at(k);
  s->noise = svd_noise_form(s->H, s->w);
  s->params = params;
  return s;
}

/// Builds every constraint of the lifted RIS program for fixed t, p, beta and
/// receive vectors.
inline Subproblem assemble_subproblem(const channel::ChannelRealization& realization, const model::Allocation& alloc,
                                      const std::vector<RisState>& input_state, const std::vector<LinearizationPoint>& points,
                                      const std::vector<model::Task>& tasks, const std::vector<model::UserParams>& users,
                                      const model::SystemParams& params, ModeLock lock = ModeLock::free, double rho_max = 28.0) {
  const int K = alloc.users();
  const int N = realization.units();
  if (static_cast<int>(points.size()) != K) throw std::invalid_argument("assemble_subproblem: missing linearization point");
  for (const auto& pt : points)
    if (pt.alpha_bar.size() != N || pt.u_bar.size() != N || pt.o_bar.size() != N + 1)
      throw std::invalid_argument("assemble_subproblem: linearization point has wrong dimensions");

  Subproblem sp;
  sp.realization = &realization;
  sp.alloc = alloc;
  sp.input_state = input_state;
  sp.tasks = tasks;
  sp.users = users;
  sp.params = params;
  sp.lock = lock;
  sp.rho_max = rho_max;
  sp.points = points;
  for (int k = 0; k < K; ++k) {
    auto s = make_slot(realization, alloc, tasks, users, params, k);
    sp.slots.push_back(s);
    auto add = [&](std::vector<ConstraintRow> rows) {
      for (auto& r : rows) sp.rows.push_back(std::move(r));
    };
    const auto& pt = points[k];
    const double pr = params.p_ris_max;

    add({{"C1", k, RowKind::linear, [s](const LiftedVars& x) {
            const double e_loc = (1.0 - s->beta) * s->c_cycles * s->kappa * x.f_local * x.f_local;
            return (s->e_max - s->t * s->p - e_loc) / s->e_max;
          }}});
    add({{"C2", k, RowKind::linear, [s, pr](const LiftedVars& x) {
            double amp = 0.0;
            for (int n = 0; n < s->units; ++n) amp += std::norm(s->h_r[n]) * x.U(n, n).real();
            amp = s->p * amp + s->params.ris_noise_power * x.U.trace().real();
            return (pr - amp) / pr;
          }}});
    add(exp_slack_constraints(s, pt));
    for (int n = 0; n < N; ++n) add(relax_binary(k, n, pt));
    add({{"C6.slot", k, RowKind::linear, [s](const LiftedVars&) { return (s->t_max - s->t) / s->t_max; }},
         {"C6.local", k, RowKind::linear, [s](const LiftedVars& x) {
            const double work = (1.0 - s->beta) * s->c_cycles;
            if (work <= 0.0) return s->t_sum / s->t_max;
            if (!(x.f_local > 0.0)) return -std::numeric_limits<double>::infinity();
            return (s->t_sum - work / x.f_local) / s->t_max;
          }}});
    add({{"C7.lo", k, RowKind::linear, [s](const LiftedVars& x) { return x.f_local / s->f_max; }},
         {"C7.hi", k, RowKind::linear, [s](const LiftedVars& x) { return 1.0 - x.f_local / s->f_max; }}});
    for (int n = 0; n < N; ++n) add(relaxed_unit_modulus(k, n));
    for (int n = 0; n < N; ++n) add(big_m_couple(k, n, rho_max, params.rho_cap));
    add(psd_lift(k, false, pt));
    add(psd_lift(k, true, pt));
  }
  return sp;
}

/// Rank-one lifting of a RIS state together with the slot's fixed data.
inline LiftedVars lift(const SlotData& s, const RisState& state, double f_local) {
  const int N = state.units();
  LiftedVars x;
  x.alpha.resize(N);
  for (int n = 0; n < N; ++n) x.alpha[n] = state.mode[n];
  x.u = state.active_coefficients().conjugate();
  x.U = x.u * x.u.adjoint();
  x.o.resize(N + 1);
  x.o.head(N) = state.coefficients();
  x.o[N] = 1.0;
  x.O = x.o * x.o.adjoint();
  const double sig = signal_power(s, x.O);
  x.sig_exp = std::log(std::max(sig, std::numeric_limits<double>::min()));
  x.noise_exp = std::log(noise_power(s, x.U));
  x.f_local = f_local;
  return x;
}

inline LinearizationPoint point_at(const LiftedVars& x) { return {x.alpha, x.u, x.o, x.noise_exp}; }

// ---- backends -------------------------------------------------------------

struct BackendCapabilities {
  bool psd = false;
};

struct BackendResult {
  std::vector<bool> slot_feasible;
  std::vector<LiftedVars> lifted;
};

class SubproblemBackend {
 public:
  virtual ~SubproblemBackend() = default;
  virtual BackendCapabilities capabilities() const = 0;
  virtual BackendResult solve(const Subproblem& program) const = 0;
};

/// Desk-scale backend: enumerates every mode pattern, aligns phases in closed
/// form for the fixed receive vector, picks a shared amplification factor by
/// bisection and sets the CPU frequency analytically. Returns rank-one lifted
/// points, so the PSD rows hold with equality.
class SurrogateBackend final : public SubproblemBackend {
 public:
  BackendCapabilities capabilities() const override { return {false}; }

  BackendResult solve(const Subproblem& sp) const override {
    BackendResult out;
    for (const auto& s : sp.slots) {
      RisState best;
      const bool ok = solve_slot(sp, *s, best);
      out.slot_feasible.push_back(ok);
      const double f = local_frequency(*s);
      out.lifted.push_back(lift(*s, ok ? best : sp.input_state.at(s->k), f));
    }
    return out;
  }

  /// Smallest frequency meeting the local-time constraint, clamped to [0, f_max].
  static double local_frequency(const SlotData& s) {
    const double work = (1.0 - s.beta) * s.c_cycles;
    if (work <= 0.0) return 0.0;
    if (!(s.t_sum > 0.0)) return s.f_max;
    return std::clamp(work / s.t_sum, 0.0, s.f_max);
  }

 private:
  static bool solve_slot(const Subproblem& sp, const SlotData& s, RisState& best) {
    const int N = s.units;
    const auto& pr = s.params;
    const cvec hw = s.H * s.w;  // conj of (w^H H^H)_n
    const cplx c0 = s.w.dot(sp.realization->h_direct.at(s.k));
    std::vector<cplx> cn(N);
    for (int n = 0; n < N; ++n) cn[n] = std::conj(hw[n]) * s.h_r[n];
    const double ref = std::abs(c0) > 0.0 ? std::arg(c0) : 0.0;

    const double gamma_req = s.beta * s.s_bits > 0.0
                                 ? (s.t > 0.0 ? std::expm1(s.beta * s.s_bits * kLn2 / (s.t * pr.bandwidth))
                                              : std::numeric_limits<double>::infinity())
                                 : 0.0;
    const double f = local_frequency(s);
    const double e_loc = (1.0 - s.beta) * s.c_cycles * s.kappa * f * f;

    double best_cost = std::numeric_limits<double>::infinity();
    double best_sinr = -1.0;
    bool found = false;
    const int patterns = 1 << N;
    for (int mask = 0; mask < patterns; ++mask) {
      if (sp.lock == ModeLock::all_active && mask != patterns - 1) continue;
      if (sp.lock == ModeLock::all_passive && mask != 0) continue;
      RisState st = RisState::uniform(N, 0);
      double a = std::abs(c0), b = 0.0, c = 0.0, hr2 = 0.0;
      int n_act = 0;
      for (int n = 0; n < N; ++n) {
        st.phase[n] = std::abs(cn[n]) > 0.0 ? wrap(ref - std::arg(cn[n])) : 0.0;
        if (mask >> n & 1) {
          st.mode[n] = 1;
          ++n_act;
          b += std::abs(cn[n]);
          c += pr.ris_noise_power * std::norm(hw[n]);
          hr2 += std::norm(s.h_r[n]);
        } else {
          a += std::abs(cn[n]);
        }
      }
      const double d = pr.ap_noise_power;
      auto gain = [&](double r) { return (a + b * r) * (a + b * r) / (c * r * r + d); };
      double rho = 1.0;
      if (n_act > 0) {
        const double amp_unit = s.p * hr2 + pr.ris_noise_power * n_act;  // amplification power per rho^2
        const double rho_hi = std::min(pr.rho_cap, amp_unit > 0.0 ? std::sqrt(pr.p_ris_max / amp_unit) : pr.rho_cap);
        if (rho_hi < 1.0) continue;
        const double rho_peak = (a > 0.0 && c > 0.0) ? b * d / (a * c) : std::numeric_limits<double>::infinity();
        const double top = std::clamp(rho_peak, 1.0, rho_hi);
        if (s.weight >= 1.0) {
          rho = top;
        } else if (s.p * gain(1.0) >= gamma_req) {
          rho = 1.0;
        } else if (s.p * gain(top) >= gamma_req) {
          double lo = 1.0, hi = top;
          for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (s.p * gain(mid) >= gamma_req ? hi : lo) = mid;
          }
          rho = hi;
        } else {
          continue;
        }
        for (int n = 0; n < N; ++n)
          if (st.mode[n]) st.amplification[n] = rho;
      }
      const double sinr = s.p * gain(rho);
      if (!(sinr >= gamma_req)) continue;
      const double amp = n_act > 0 ? rho * rho * (s.p * hr2 + pr.ris_noise_power * n_act) : 0.0;
      const double energy = s.t * s.p + e_loc + s.t * (n_act * (pr.p_circuit + pr.p_dc) + amp) + s.t * (N - n_act) * pr.p_circuit;
      const double cost = s.weight * s.t + (1.0 - s.weight) * pr.energy_scale * energy;
      if (cost < best_cost || (cost == best_cost && sinr > best_sinr)) {
        best_cost = cost;
        best_sinr = sinr;
        best = st;
        found = true;
      }
    }
    return found;
  }

  static double wrap(double x) {
    x = std::fmod(x, 2.0 * kPi);
    return x < 0.0 ? x + 2.0 * kPi : x;
  }
};

// ---- recovery -------------------------------------------------------------

struct RecoveryOutcome {
  std::vector<RisState> ris;
  rvec f_local;
  double objective = 0.0;
  std::vector<bool> slot_flagged;  // backend reported the slot infeasible
  std::vector<bool> slot_updated;  // recovered point replaced the input
};

/// Rounds and projects a lifted point back to a RIS state, then repairs C2 by
/// switching the most power-hungry active units to passive.
inline RisState recover_state(const SlotData& s, const LiftedVars& x, double rho_cap) {
  const int N = s.units;
  RisState st = RisState::uniform(N, 0);
  for (int n = 0; n < N; ++n) {
    st.mode[n] = x.alpha[n] >= 0.5 ? 1 : 0;
    st.phase[n] = std::arg(x.o[n]);
    if (st.phase[n] < 0.0) st.phase[n] += 2.0 * kPi;
    st.amplification[n] = st.mode[n] ? std::clamp(std::abs(x.u[n]), 1.0, rho_cap) : 1.0;
  }
  for (;;) {
    const auto pw = model::ris_power(st, s.p, s.h_r, s.params);
    if (pw.amplification <= s.params.p_ris_max) break;
    int worst = -1;
    double worst_draw = -1.0;
    for (int n = 0; n < N; ++n) {
      if (!st.mode[n]) continue;
      const double draw = st.amplification[n] * st.amplification[n] * (s.p * std::norm(s.h_r[n]) + s.params.ris_noise_power);
      if (draw > worst_draw) {
        worst_draw = draw;
        worst = n;
      }
    }
    if (worst < 0) break;
    st.mode[worst] = 0;
    st.amplification[worst] = 1.0;
  }
  return st;
}

/// Solves the lifted program with `backend`, recovers RIS states and keeps,
/// slot by slot, whichever of {recovered, input} has the lower true cost
/// among feasible candidates.
inline RecoveryOutcome solve_and_recover(const Subproblem& sp, const SubproblemBackend& backend) {
  const int K = static_cast<int>(sp.slots.size());
  const auto result = backend.solve(sp);
  RecoveryOutcome out;
  out.ris = sp.input_state;
  out.f_local = sp.alloc.f_local;
  out.slot_flagged.assign(K, false);
  out.slot_updated.assign(K, false);

  const auto& rz = *sp.realization;
  const auto base_cost = model::total_cost(sp.alloc, sp.input_state, rz, sp.tasks, sp.params, sp.users);
  const auto base_feas = model::check_feasibility(sp.alloc, sp.input_state, rz, sp.tasks, sp.params, sp.users);
  for (int k = 0; k < K; ++k) {
    if (!result.slot_feasible.at(k)) {
      out.slot_flagged[k] = true;
      continue;
    }
    const auto& s = *sp.slots[k];
    RisState cand = recover_state(s, result.lifted.at(k), sp.params.rho_cap);
    if (sp.lock == ModeLock::all_active)
      for (int n = 0; n < s.units; ++n)
        if (!cand.mode[n]) cand = sp.input_state.at(k);
    if (sp.lock == ModeLock::all_passive && cand.n_active() > 0) cand = sp.input_state.at(k);

    model::Allocation alloc = sp.alloc;
    alloc.f_local[k] = result.lifted[k].f_local;
    std::vector<RisState> states = out.ris;
    states[k] = cand;
    const auto cost = model::total_cost(alloc, states, rz, sp.tasks, sp.params, sp.users);
    const auto feas = model::check_feasibility(alloc, states, rz, sp.tasks, sp.params, sp.users);
    const bool cand_ok = feas.users[k].scaled[model::C4] >= -1e-9 && feas.users[k].scaled[model::C2] >= -1e-9 &&
                         feas.users[k].scaled[model::C1] >= -1e-9 && feas.users[k].scaled[model::C6] >= -1e-9 &&
                         feas.users[k].scaled[model::C7] >= -1e-9 && feas.users[k].rho_range >= -1e-9;
    const bool base_ok = base_feas.users[k].scaled[model::C4] >= -1e-9 && base_feas.users[k].scaled[model::C2] >= -1e-9;

    const double slot_new = cost.weights[k] * cost.t[k] + (1.0 - cost.weights[k]) * cost.energy_scale * cost.e_total[k];
    const double slot_old =
        base_cost.weights[k] * base_cost.t[k] + (1.0 - base_cost.weights[k]) * base_cost.energy_scale * base_cost.e_total[k];
    const double sinr_new = model::sinr(rz, cand, alloc, sp.params, k);
    const double sinr_old = model::sinr(rz, sp.input_state.at(k), sp.alloc, sp.params, k);
    const bool better = slot_new < slot_old || (slot_new <= slot_old && sinr_new > sinr_old);
    if (cand_ok && (!base_ok || better)) {
      out.ris[k] = cand;
      out.f_local[k] = alloc.f_local[k];
      out.slot_updated[k] = true;
    }
  }
  model::Allocation fin = sp.alloc;
  fin.f_local = out.f_local;
  out.objective = model::total_cost(fin, out.ris, rz, sp.tasks, sp.params, sp.users).total_cost;
  return out;
}

/// Linearization points at the rank-one lift of the current states.
inline std::vector<LinearizationPoint> points_from_state(const channel::ChannelRealization& realization, const model::Allocation& alloc,
                                                         const std::vector<RisState>& ris, const std::vector<model::Task>& tasks,
                                                         const std::vector<model::UserParams>& users, const model::SystemParams& params) {
  std::vector<LinearizationPoint> pts;
  for (int k = 0; k < alloc.users(); ++k) {
    const auto s = make_slot(realization, alloc, tasks, users, params, k);
    pts.push_back(point_at(lift(*s, ris.at(k), alloc.f_local[k])));
  }
  return pts;
}

}  // namespace hris::sca
