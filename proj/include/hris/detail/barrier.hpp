#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hris::detail {

/// Smooth convex inequality g(x) <= 0. `eval` returns g(x) and, when the
/// pointers are non-null, adds its gradient / Hessian. It may return +inf
/// outside its domain.
struct InequalityConstraint {
  std::string name;
  std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*, Eigen::MatrixXd*)> eval;
  /// Domain constraints (variable bounds) are never relaxed by phase I and are
  /// evaluated first during line searches.
  bool domain = false;
};

struct BarrierOptions {
  double mu_growth = 10.0;
  double gap_tol = 1e-11;
  int max_newton = 200;
  int max_outer = 60;
  double newton_tol = 1e-14;
};

struct BarrierResult {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  // lambda_i = 1 / (tau * -g_i)
  double tau = 0.0;
  int newton_iterations = 0;
  bool converged = false;
};

/// Log-barrier path following for min c^T x s.t. g_i(x) <= 0 from a strictly
/// feasible start.
class BarrierSolver {
 public:
  BarrierSolver(Eigen::VectorXd c, std::vector<InequalityConstraint> constraints, BarrierOptions options = {})
      : c_(std::move(c)), cons_(std::move(constraints)), opt_(options) {}

  const std::vector<InequalityConstraint>& constraints() const { return cons_; }

  bool strictly_feasible(const Eigen::VectorXd& x) const {
    for (const auto& g : ordered()) {
      const double v = g->eval(x, nullptr, nullptr);
      if (!(v < 0.0)) return false;
    }
    return true;
  }

  /// Runs the barrier method. `stop` is consulted after every centering step
  /// (phase I uses it to exit as soon as a strictly feasible point appears).
  BarrierResult solve(Eigen::VectorXd x, double tau0,
                      const std::function<bool(const Eigen::VectorXd&)>& stop = nullptr) const {
    BarrierResult res;
    const auto m = static_cast<double>(cons_.size());
    double tau = tau0;
    for (int outer = 0; outer < opt_.max_outer; ++outer) {
      res.newton_iterations += center(x, tau);
      if (stop && stop(x)) {
        res.converged = true;
        break;
      }
      if (m / tau < opt_.gap_tol) {
        res.converged = true;
        break;
      }
      tau *= opt_.mu_growth;
    }
    res.x = x;
    res.tau = tau;
    res.multipliers.resize(static_cast<Eigen::Index>(cons_.size()));
    for (std::size_t i = 0; i < cons_.size(); ++i)
      res.multipliers[static_cast<Eigen::Index>(i)] = 1.0 / (tau * -cons_[i].eval(x, nullptr, nullptr));
    return res;
  }

  double barrier_value(const Eigen::VectorXd& x, double tau) const {
    double f = tau * c_.dot(x);
    for (const auto* g : ordered()) {
      const double v = g->eval(x, nullptr, nullptr);
      if (!(v < 0.0)) return std::numeric_limits<double>::infinity();
      f -= std::log(-v);
    }
    return f;
  }

 private:
  std::vector<const InequalityConstraint*> ordered() const {
    std::vector<const InequalityConstraint*> out;
    for (const auto& g : cons_)
      if (g.domain) out.push_back(&g);
    for (const auto& g : cons_)
      if (!g.domain) out.push_back(&g);
    return out;
  }

  int center(Eigen::VectorXd& x, double tau) const {
    const Eigen::Index n = x.size();
    int iters = 0;
    for (; iters < opt_.max_newton; ++iters) {
      Eigen::VectorXd grad = tau * c_;
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
      for (const auto& g : cons_) {
        Eigen::VectorXd gi = Eigen::VectorXd::Zero(n);
        Eigen::MatrixXd hi = Eigen::MatrixXd::Zero(n, n);
        const double v = g.eval(x, &gi, &hi);
        const double inv = 1.0 / -v;
        grad += inv * gi;
        hess += inv * inv * gi * gi.transpose() + inv * hi;
      }
      // Tiny diagonal shift keeps the factorization defined when a variable
      // does not enter any constraint curvature.
      const double shift = 1e-14 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
      hess.diagonal().array() += shift;
      const Eigen::VectorXd step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (!(decrement > 0.0) || decrement / 2.0 <= opt_.newton_tol || !step.allFinite()) break;

      const double f0 = barrier_value(x, tau);
      double s = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 80; ++ls, s *= 0.5) {
        const Eigen::VectorXd trial = x + s * step;
        const double f1 = barrier_value(trial, tau);
        if (f1 <= f0 - 0.25 * s * decrement) {
          x = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    return iters;
  }

  Eigen::VectorXd c_;
  std::vector<InequalityConstraint> cons_;
  BarrierOptions opt_;
};

}  // namespace hris::detail
