#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hris/detail/barrier.hpp"
#include "hris/model.hpp"

namespace hris::timepower {

/// Per-user data of the time / energy / offloading-ratio subproblem once the
/// receive vectors, RIS state and CPU frequency are fixed.
struct UserTerms {
  double gain = 0.0;        // G_k = |w^H g|^2 / (sigma^2 ||w^H H^H A Lambda Theta||^2 + delta^2), 1/W
  double s_bits = 0.0;
  double c_cycles = 0.0;
  double kappa = 0.0;
  double f_local = 0.0;
  double e_max = 0.0;
  double t_max = 0.0;
  double amp_signal = 0.0;  // ||A Lambda Theta h_r||^2, multiplies p_bar
  double amp_noise = 0.0;   // sigma^2 ||A Lambda Theta||^2, W, multiplies t
  double ris_static = 0.0;  // N_act (P_C + P_DC) + (N - N_act) P_C, W
  double weight = 0.5;      // w_k
  double beta_lo = 0.0;
  double beta_hi = 1.0;
};

/// Decision vector; p_bar = p * t is the energy spent on transmission.
struct ConvexPoint {
  rvec t;
  rvec p_bar;
  rvec beta;
};

struct TimePowerProblem {
  std::vector<UserTerms> users;
  double energy_scale = 1.0;
  double bandwidth = 1e6;
  double p_ris_max = 0.01;
  std::optional<ConvexPoint> warm_start;
};

struct KktReport {
  double primal = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;
};

struct TimePowerSolution {
  bool feasible = false;
  ConvexPoint point;
  KktReport kkt;
  double objective = 0.0;
  int newton_iterations = 0;
  /// For infeasible problems: the constraints that stay violated at the
  /// phase-I optimum, and that optimum's worst scaled violation.
  std::string certificate;
  double phase1_violation = 0.0;
};

/// t * ln(1 + p_bar G / t), extended by 0 at t = 0.
inline double perspective_log(double t, double p_bar, double gain) {
  if (t <= 0.0) return 0.0;
  return t * std::log1p(p_bar * gain / t);
}

/// p_k = p_bar_k / t_k, with p = 0 whenever t = 0.
inline rvec recover_power(const ConvexPoint& point) {
  rvec p(point.t.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) p[k] = point.t[k] > 0.0 ? point.p_bar[k] / point.t[k] : 0.0;
  return p;
}

inline double objective(const TimePowerProblem& prob, const ConvexPoint& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < prob.users.size(); ++i) {
    const auto& u = prob.users[i];
    const auto k = static_cast<Eigen::Index>(i);
    const double e_loc = (1.0 - x.beta[k]) * u.c_cycles * u.kappa * u.f_local * u.f_local;
    const double energy = x.p_bar[k] * (1.0 + u.amp_signal) + e_loc + x.t[k] * (u.ris_static + u.amp_noise);
    acc += u.weight * x.t[k] + (1.0 - u.weight) * prob.energy_scale * energy;
  }
  return acc;
}

namespace detail {

using hris::detail::InequalityConstraint;

/// Scaled formulation: x = (t / T_max, p_bar / E_max, beta) per user with
/// fixed betas removed. Every constraint is divided by a natural magnitude.
class ScaledModel {
 public:
  explicit ScaledModel(const TimePowerProblem& prob) : prob_(prob) {
    int idx = 0;
    for (const auto& u : prob_.users) {
      Slot s;
      s.t = idx++;
      s.p = idx++;
      s.beta_lo = u.beta_lo;
      s.beta_hi = u.beta_hi;
      if (u.f_local <= 0.0 && u.c_cycles > 0.0) s.beta_lo = std::max(s.beta_lo, 1.0);
      if (u.gain <= 0.0 && u.s_bits > 0.0) s.beta_hi = std::min(s.beta_hi, 0.0);
      s.beta = s.beta_lo < s.beta_hi ? idx++ : -1;
      slots_.push_back(s);
    }
    n_ = idx;
    build();
  }

  int dim() const { return n_; }
  const Eigen::VectorXd& cost() const { return cost_; }
  double cost_norm() const { return cost_norm_; }
  const std::vector<InequalityConstraint>& constraints() const { return cons_; }
  bool bounds_consistent() const {
    for (const auto& s : slots_)
      if (s.beta_lo > s.beta_hi) return false;
    return true;
  }

  Eigen::VectorXd to_x(const ConvexPoint& p) const {
    Eigen::VectorXd x(n_);
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      const auto& u = prob_.users[i];
      const auto k = static_cast<Eigen::Index>(i);
      x[slots_[i].t] = p.t[k] / u.t_max;
      x[slots_[i].p] = p.p_bar[k] / u.e_max;
      if (slots_[i].beta >= 0) x[slots_[i].beta] = p.beta[k];
    }
    return x;
  }

  ConvexPoint from_x(const Eigen::VectorXd& x) const {
    const auto K = static_cast<Eigen::Index>(slots_.size());
    ConvexPoint p{rvec(K), rvec(K), rvec(K)};
    for (Eigen::Index k = 0; k < K; ++k) {
      const auto& s = slots_[k];
      const auto& u = prob_.users[k];
      p.t[k] = x[s.t] * u.t_max;
      p.p_bar[k] = x[s.p] * u.e_max;
      p.beta[k] = s.beta >= 0 ? x[s.beta] : s.beta_lo;
    }
    return p;
  }

  Eigen::VectorXd default_start() const {
    Eigen::VectorXd x(n_);
    for (const auto& s : slots_) {
      x[s.t] = 0.5;
      x[s.p] = 1e-3;
      if (s.beta >= 0) x[s.beta] = 0.5 * (s.beta_lo + s.beta_hi);
    }
    return x;
  }

 private:
  struct Slot {
    int t = -1, p = -1, beta = -1;
    double beta_lo = 0.0, beta_hi = 1.0;
  };

  void build() {
    cost_ = Eigen::VectorXd::Zero(n_);
    const double a = prob_.energy_scale;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      const auto& s = slots_[i];
      const auto& u = prob_.users[i];
      const std::string tag = "[" + std::to_string(i) + "]";
      const double w = u.weight;
      const double floc = u.c_cycles * u.kappa * u.f_local * u.f_local;
      cost_[s.t] = (w + (1.0 - w) * a * (u.ris_static + u.amp_noise)) * u.t_max;
      cost_[s.p] = (1.0 - w) * a * (1.0 + u.amp_signal) * u.e_max;
      if (s.beta >= 0) cost_[s.beta] = -(1.0 - w) * a * floc;

      const int it = s.t, ip = s.p, ib = s.beta;
      const double blo = s.beta_lo, bhi = s.beta_hi;
      auto beta_of = [ib, blo](const Eigen::VectorXd& x) { return ib >= 0 ? x[ib] : blo; };

      cons_.push_back({"t>=0" + tag, linear({{it, -1.0}}, 0.0), true});
      cons_.push_back({"C6:t<=Tmax" + tag, linear({{it, 1.0}}, -1.0), true});
      cons_.push_back({"p>=0" + tag, linear({{ip, -1.0}}, 0.0), true});
      if (ib >= 0) {
        cons_.push_back({"C3:beta>=lo" + tag, linear({{ib, -1.0}}, blo), true});
        cons_.push_back({"C3:beta<=hi" + tag, linear({{ib, 1.0}}, -bhi), true});
      }

      // C1: p_bar + (1 - beta) C kappa f^2 <= E_max, divided by E_max.
      {
        const double r = floc / u.e_max;
        if (ib >= 0)
          cons_.push_back({"C1" + tag, linear({{ip, 1.0}, {ib, -r}}, r - 1.0), false});
        else
          cons_.push_back({"C1" + tag, linear({{ip, 1.0}}, (1.0 - blo) * r - 1.0), false});
      }

      // C2: p_bar a + t sigma^2 b <= t P_R, divided by T_max P_R.
      if (u.amp_signal > 0.0 || u.amp_noise > 0.0) {
        const double pr = prob_.p_ris_max;
        cons_.push_back({"C2" + tag,
                         linear({{ip, u.e_max * u.amp_signal / (u.t_max * pr)}, {it, (u.amp_noise - pr) / pr}}, 0.0),
                         false});
      }

      // C6: (1 - beta) C <= f sum_j t_j, divided by C.
      if (u.c_cycles > 0.0 && blo < 1.0) {
        std::vector<std::pair<int, double>> terms;
        for (std::size_t j = 0; j < slots_.size(); ++j)
          terms.emplace_back(slots_[j].t, -u.f_local * prob_.users[j].t_max / u.c_cycles);
        if (ib >= 0) {
          terms.emplace_back(ib, -1.0);
          cons_.push_back({"C6:local" + tag, linear(terms, 1.0), false});
        } else {
          cons_.push_back({"C6:local" + tag, linear(terms, 1.0 - blo), false});
        }
      }

      // C4: beta S <= (B / ln 2) t ln(1 + p_bar G / t), divided by S.
      if (u.s_bits > 0.0 && bhi > 0.0) {
        const double k4 = prob_.bandwidth / (u.s_bits * kLn2);
        const double T = u.t_max, E = u.e_max, G = u.gain;
        cons_.push_back(
            {"C4" + tag,
             [=](const Eigen::VectorXd& x, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
               const double t = T * x[it];
               const double pb = E * x[ip];
               if (!(t > 0.0) || !(pb >= 0.0)) return std::numeric_limits<double>::infinity();
               const double beta = beta_of(x);
               const double y = pb * G / t;
               const double phi = t * std::log1p(y);
               if (grad) {
                 const double dphi_dt = std::log1p(y) - y / (1.0 + y);
                 const double dphi_dp = G / (1.0 + y);
                 (*grad)[it] += -k4 * T * dphi_dt;
                 (*grad)[ip] += -k4 * E * dphi_dp;
                 if (ib >= 0) (*grad)[ib] += 1.0;
               }
               if (hess) {
                 // Hessian of phi is -G^2/(t (t + pb G)^2) (pb, -t)(pb, -t)^T.
                 const double d = t + pb * G;
                 const double coef = k4 * G * G / (t * d * d);
                 const double vt = T * pb, vp = -E * t;
                 (*hess)(it, it) += coef * vt * vt;
                 (*hess)(it, ip) += coef * vt * vp;
                 (*hess)(ip, it) += coef * vt * vp;
                 (*hess)(ip, ip) += coef * vp * vp;
               }
               return beta - k4 * phi;
             },
             false});
      }
    }
    cost_norm_ = cost_.cwiseAbs().maxCoeff();
    if (!(cost_norm_ > 0.0)) cost_norm_ = 1.0;
  }

  static std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*, Eigen::MatrixXd*)> linear(
      std::vector<std::pair<int, double>> terms, double constant) {
    return [terms = std::move(terms), constant](const Eigen::VectorXd& x, Eigen::VectorXd* grad, Eigen::MatrixXd*) {
      double v = constant;
      for (const auto& [i, a] : terms) {
        v += a * x[i];
        if (grad) (*grad)[i] += a;
      }
      return v;
    };
  }

  const TimePowerProblem& prob_;
  std::vector<Slot> slots_;
  int n_ = 0;
  Eigen::VectorXd cost_;
  double cost_norm_ = 1.0;
  std::vector<InequalityConstraint> cons_;
};

inline double max_violation(const ScaledModel& model, const Eigen::VectorXd& x) {
  double worst = 0.0;
  for (const auto& g : model.constraints()) worst = std::max(worst, g.eval(x, nullptr, nullptr));
  return worst;
}

/// Lawson-Hanson non-negative least squares, min ||A l - b|| s.t. l >= 0.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index n = A.cols();
  Eigen::VectorXd l = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (b - A * l);
    Eigen::Index j = -1;
    double best = 1e-14 * std::max(1.0, b.norm());
    for (Eigen::Index i = 0; i < n; ++i)
      if (!passive[i] && w[i] > best) best = w[i], j = i;
    if (j < 0) break;
    passive[j] = true;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index i = 0; i < n; ++i)
        if (passive[i]) idx.push_back(i);
      Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t q = 0; q < idx.size(); ++q) Ap.col(static_cast<Eigen::Index>(q)) = A.col(idx[q]);
      const Eigen::VectorXd z = Ap.completeOrthogonalDecomposition().solve(b);
      if ((z.array() > 0.0).all()) {
        l.setZero();
        for (std::size_t q = 0; q < idx.size(); ++q) l[idx[q]] = z[static_cast<Eigen::Index>(q)];
        break;
      }
      double alpha = 1.0;
      for (std::size_t q = 0; q < idx.size(); ++q) {
        const double zq = z[static_cast<Eigen::Index>(q)];
        if (zq <= 0.0) alpha = std::min(alpha, l[idx[q]] / (l[idx[q]] - zq));
      }
      for (std::size_t q = 0; q < idx.size(); ++q) {
        const auto i = idx[q];
        l[i] += alpha * (z[static_cast<Eigen::Index>(q)] - l[i]);
        if (l[i] <= 1e-300) l[i] = 0.0, passive[i] = false;
      }
    }
  }
  return l;
}

inline KktReport kkt_with(const std::vector<double>& g, const std::vector<Eigen::VectorXd>& grads, const Eigen::VectorXd& c,
                          const Eigen::VectorXd& lambda) {
  KktReport r;
  Eigen::VectorXd station = c;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double li = lambda[static_cast<Eigen::Index>(i)];
    station += li * grads[i];
    r.primal = std::max(r.primal, std::max(0.0, g[i]));
    r.complementarity = std::max(r.complementarity, std::abs(li * g[i]));
  }
  r.stationarity = station.cwiseAbs().maxCoeff() / std::max(1.0, c.cwiseAbs().maxCoeff());
  return r;
}

/// KKT residuals at x. Two multiplier candidates are scored: the barrier
/// duals, and a non-negative least-squares fit over the nearly active
/// constraints. The better-centred of the two is reported.
inline KktReport kkt_report(const ScaledModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& lambda) {
  const Eigen::VectorXd c = model.cost() / model.cost_norm();
  const auto& cons = model.constraints();
  std::vector<double> g(cons.size());
  std::vector<Eigen::VectorXd> grads(cons.size());
  std::vector<Eigen::Index> active;
  for (std::size_t i = 0; i < cons.size(); ++i) {
    grads[i] = Eigen::VectorXd::Zero(x.size());
    g[i] = cons[i].eval(x, &grads[i], nullptr);
    if (g[i] >= -1e-8) active.push_back(static_cast<Eigen::Index>(i));
  }
  const KktReport barrier = kkt_with(g, grads, c, lambda);

  Eigen::MatrixXd J(x.size(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t q = 0; q < active.size(); ++q) J.col(static_cast<Eigen::Index>(q)) = grads[active[q]];
  const Eigen::VectorXd la = active.empty() ? Eigen::VectorXd() : nnls(J, -c);
  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cons.size()));
  for (std::size_t q = 0; q < active.size(); ++q) fitted[active[q]] = la[static_cast<Eigen::Index>(q)];
  const KktReport ls = kkt_with(g, grads, c, fitted);

  const auto score = [](const KktReport& r) { return std::max(r.stationarity, r.complementarity); };
  return score(ls) < score(barrier) ? ls : barrier;
}

/// Lowers each p_bar to the smallest value meeting C4 with equality. The
/// objective is non-decreasing in p_bar, so this never hurts, and it makes
/// p_bar exactly 0 for users with nothing to send.
inline void tighten_energy(const TimePowerProblem& prob, ConvexPoint& x) {
  for (std::size_t i = 0; i < prob.users.size(); ++i) {
    const auto& u = prob.users[i];
    const auto k = static_cast<Eigen::Index>(i);
    const double need = x.beta[k] * u.s_bits;
    double p_min = 0.0;
    if (need > 0.0) {
      if (!(x.t[k] > 0.0) || !(u.gain > 0.0)) continue;
      p_min = x.t[k] / u.gain * std::expm1(need * kLn2 / (x.t[k] * prob.bandwidth));
      p_min *= 1.0 + 1e-12;
    }
    if (p_min < x.p_bar[k]) x.p_bar[k] = p_min;
  }
}

}  // namespace detail

/// Feasibility of a point for the subproblem, as the largest scaled violation.
inline double max_violation(const TimePowerProblem& prob, const ConvexPoint& point) {
  detail::ScaledModel model(prob);
  // Variables are pinned to their bounds in the scaled model; report any
  // mismatch with a pinned beta as a violation too.
  double extra = 0.0;
  for (std::size_t i = 0; i < prob.users.size(); ++i) {
    const auto& u = prob.users[i];
    const auto k = static_cast<Eigen::Index>(i);
    extra = std::max({extra, u.beta_lo - point.beta[k], point.beta[k] - u.beta_hi});
  }
  const Eigen::VectorXd x = model.to_x(point);
  double v = std::max(extra, detail::max_violation(model, x));
  // C4 at t = 0: the perspective extension is 0, so beta S must be 0.
  for (std::size_t i = 0; i < prob.users.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (point.t[k] == 0.0 && point.beta[k] * prob.users[i].s_bits > 0.0) v = std::max(v, point.beta[k]);
  }
  return v;
}

/// Solves the convex time / energy / offloading-ratio subproblem with a
/// log-barrier method (phase I when no strictly feasible start is at hand).
inline TimePowerSolution solve_time_power(const TimePowerProblem& prob, const hris::detail::BarrierOptions& options = {}) {
  TimePowerSolution out;
  detail::ScaledModel model(prob);
  if (!model.bounds_consistent()) {
    out.certificate = "C3/C4/C6: offloading ratio bounds are empty (no channel gain and no local CPU)";
    out.phase1_violation = 1.0;
    return out;
  }

  const Eigen::VectorXd c = model.cost() / model.cost_norm();
  hris::detail::BarrierSolver solver(c, model.constraints(), options);

  Eigen::VectorXd x0;
  if (prob.warm_start && solver.strictly_feasible(model.to_x(*prob.warm_start))) {
    x0 = model.to_x(*prob.warm_start);
  } else if (solver.strictly_feasible(model.default_start())) {
    x0 = model.default_start();
  } else {
    // Phase I: min s subject to g_i(x) <= s for the non-domain constraints.
    const Eigen::VectorXd xs = model.default_start();
    const int n = model.dim();
    std::vector<hris::detail::InequalityConstraint> relaxed;
    double s0 = 0.0;
    for (const auto& g : model.constraints()) {
      if (g.domain) {
        relaxed.push_back({g.name,
                           [f = g.eval, n](const Eigen::VectorXd& z, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
                             Eigen::VectorXd gx = Eigen::VectorXd::Zero(n);
                             Eigen::MatrixXd hx = Eigen::MatrixXd::Zero(n, n);
                             const double v = f(z.head(n), grad ? &gx : nullptr, hess ? &hx : nullptr);
                             if (grad) grad->head(n) += gx;
                             if (hess) hess->topLeftCorner(n, n) += hx;
                             return v;
                           },
                           true});
      } else {
        s0 = std::max(s0, g.eval(xs, nullptr, nullptr));
        relaxed.push_back({g.name,
                           [f = g.eval, n](const Eigen::VectorXd& z, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
                             Eigen::VectorXd gx = Eigen::VectorXd::Zero(n);
                             Eigen::MatrixXd hx = Eigen::MatrixXd::Zero(n, n);
                             const double v = f(z.head(n), grad ? &gx : nullptr, hess ? &hx : nullptr);
                             if (grad) {
                               grad->head(n) += gx;
                               (*grad)[n] -= 1.0;
                             }
                             if (hess) hess->topLeftCorner(n, n) += hx;
                             return v - z[n];
                           },
                           false});
      }
    }
    relaxed.push_back({"s>=-1",
                       [n](const Eigen::VectorXd& z, Eigen::VectorXd* grad, Eigen::MatrixXd*) {
                         if (grad) (*grad)[n] -= 1.0;
                         return -1.0 - z[n];
                       },
                       true});
    Eigen::VectorXd cz = Eigen::VectorXd::Zero(n + 1);
    cz[n] = 1.0;
    Eigen::VectorXd z0(n + 1);
    z0 << xs, s0 + 1.0;
    hris::detail::BarrierSolver phase1(cz, relaxed, options);
    const auto r1 = phase1.solve(z0, 1.0, [&](const Eigen::VectorXd& z) { return z[n] < 0.0 && solver.strictly_feasible(z.head(n)); });
    out.newton_iterations += r1.newton_iterations;
    const Eigen::VectorXd xz = r1.x.head(n);
    if (!solver.strictly_feasible(xz)) {
      const double s_star = r1.x[n];
      out.phase1_violation = s_star;
      std::string names;
      for (const auto& g : model.constraints()) {
        if (g.domain) continue;
        const double v = g.eval(xz, nullptr, nullptr);
        if (v >= s_star - 1e-6 * (1.0 + std::abs(s_star))) names += (names.empty() ? "" : ", ") + g.name;
      }
      out.certificate = "no point satisfies {" + names + "} jointly; smallest common violation " + std::to_string(s_star);
      return out;
    }
    x0 = xz;
  }

  const auto res = solver.solve(x0, 1.0);
  out.newton_iterations += res.newton_iterations;
  out.point = model.from_x(res.x);
  detail::tighten_energy(prob, out.point);
  out.objective = objective(prob, out.point);

  if (prob.warm_start && max_violation(prob, *prob.warm_start) <= 1e-12) {
    const double warm = objective(prob, *prob.warm_start);
    if (warm < out.objective) {
      out.point = *prob.warm_start;
      out.objective = warm;
    }
  }
  out.kkt = detail::kkt_report(model, model.to_x(out.point), res.multipliers);
  out.kkt.primal = std::max(out.kkt.primal, max_violation(prob, out.point));
  out.feasible = true;
  return out;
}

/// Builds the subproblem for fixed receive vectors, RIS state and CPU
/// frequencies. `beta_lo` / `beta_hi` pin the offloading ratio for the
/// binary-offloading baselines.
inline TimePowerProblem make_problem(const channel::ChannelRealization& realization, const std::vector<model::RisState>& ris,
                                     const model::Allocation& alloc, const std::vector<model::Task>& tasks,
                                     const model::SystemParams& params, const std::vector<model::UserParams>& users,
                                     double beta_lo = 0.0, double beta_hi = 1.0) {
  TimePowerProblem prob;
  prob.energy_scale = params.energy_scale;
  prob.bandwidth = params.bandwidth;
  prob.p_ris_max = params.p_ris_max;
  for (int k = 0; k < alloc.users(); ++k) {
    const auto& state = ris.at(k);
    UserTerms u;
    u.gain = model::sinr_gain(realization, state, alloc.beamformer.at(k), params, k);
    u.s_bits = tasks.at(k).s_bits;
    u.c_cycles = tasks.at(k).c_cycles;
    u.kappa = users.at(k).kappa;
    u.f_local = alloc.f_local[k];
    u.e_max = users.at(k).e_max;
    u.t_max = users.at(k).t_max;
    const cvec a = state.active_coefficients();
    u.amp_signal = a.cwiseProduct(realization.h_user_ris.at(k)).squaredNorm();
    u.amp_noise = params.ris_noise_power * a.squaredNorm();
    const int n_act = state.n_active();
    u.ris_static = n_act * (params.p_circuit + params.p_dc) + (state.units() - n_act) * params.p_circuit;
    u.weight = params.weight(k);
    u.beta_lo = beta_lo;
    u.beta_hi = beta_hi;
    prob.users.push_back(u);
  }
  return prob;
}

}  // namespace hris::timepower
