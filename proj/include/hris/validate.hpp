#pragma once

#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hris/beamforming.hpp"
#include "hris/closedform.hpp"
#include "hris/orchestrator.hpp"
#include "hris/sca.hpp"
#include "hris/timepower.hpp"

// Fast invariant suite behind the `validate` subcommand. The full
// acceptance runs live in the test tree.
namespace hris::validate {

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

inline cvec random_cvec(std::mt19937_64& g, int n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale / std::sqrt(2.0));
  cvec v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(d(g), d(g));
  return v;
}

/// Channels with i.i.d. complex Gaussian entries at the given scales.
inline channel::ChannelRealization random_realization(std::mt19937_64& g, int users, int antennas, int units,
                                                      double direct = 1e-4, double user_ris = 1e-3, double ris_ap = 1e-2) {
  channel::ChannelRealization rz;
  for (int k = 0; k < users; ++k) {
    rz.h_direct.push_back(random_cvec(g, antennas, direct));
    rz.h_user_ris.push_back(random_cvec(g, units, user_ris));
  }
  rz.h_ris_ap.resize(units, antennas);
  for (int n = 0; n < units; ++n) rz.h_ris_ap.row(n) = random_cvec(g, antennas, ris_ap).transpose();
  return rz;
}

inline model::RisState random_state(std::mt19937_64& g, int units, double rho_cap) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  model::RisState s = model::RisState::uniform(units, 0);
  for (int n = 0; n < units; ++n) {
    s.mode[n] = u01(g) < 0.5 ? 1 : 0;
    s.amplification[n] = 1.0 + (rho_cap - 1.0) * u01(g);
    s.phase[n] = 2.0 * kPi * u01(g);
  }
  return s;
}

inline CheckResult check_mmse(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  model::SystemParams params;
  double worst = 0.0;
  bool dominated = true;
  for (int trial = 0; trial < 20; ++trial) {
    const auto rz = random_realization(g, 1, 8, 6);
    const auto s = random_state(g, 6, params.rho_cap);
    const double p = 0.01;
    const cvec w = beamforming::mmse_beamformer(rz, s, p, params, 0);
    const double got = p * model::sinr_gain(rz, s, w, params, 0);
    const cvec h = model::effective_channel(rz, s, 0);
    const cmat A = p * h * h.adjoint();
    const cmat B = beamforming::noise_covariance(rz, s, params);
    Eigen::GeneralizedSelfAdjointEigenSolver<cmat> ges(A, B);
    const double best = ges.eigenvalues().maxCoeff();
    worst = std::max(worst, std::abs(got - best) / best);
    for (int i = 0; i < 200; ++i) {
      const cvec v = random_cvec(g, 8).normalized();
      if (p * model::sinr_gain(rz, s, v, params, 0) > got * (1.0 + 1e-12)) dominated = false;
    }
  }
  std::ostringstream os;
  os << "max relative gap to generalized eigenvalue " << worst;
  return {"mmse_optimality", worst < 1e-9 && dominated, os.str()};
}

inline CheckResult check_latency_amp(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  model::SystemParams params;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const closedform::ConservativeChannel cc{u(g), u(g)};
    const double n = 1 + static_cast<int>(u(g) * 6);
    const double p = 0.01 * u(g);
    const double rho = closedform::latency_amp(cc, n, p, params);
    worst = std::max(worst, std::abs(closedform::amplification_power(cc, n, rho, p, params) / params.p_ris_max - 1.0));
  }
  std::ostringstream os;
  os << "max relative budget gap " << worst;
  return {"latency_amp_budget_equality", worst < 1e-12, os.str()};
}

inline CheckResult check_count_structure(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    model::SystemParams params;
    const int N = 1 + static_cast<int>(u(g) * 64);
    params.p_ris_max = 4.0 * N * params.ris_noise_power * (1.0 + 1e6 * u(g));
    const closedform::ConservativeChannel cc{0.01 + u(g), 0.01 + u(g)};
    const auto a = closedform::count_analysis(cc, 1e-3 + 0.01 * u(g), params, N);
    if (!(a.x1 < 0.0 && 0.0 < a.x2 && a.x2 < a.x3)) ++bad;
    if (std::sqrt(static_cast<double>(N)) > a.x3 && a.gap_factored() < 0.0) ++bad;
  }
  return {"count_root_ordering", bad == 0, std::to_string(bad) + " violations in 1000 draws"};
}

inline CheckResult check_taylor(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const double a = u(g), b = u(g);
    if (sca::binary_taylor(a, b) > a * a + 1e-12) ++bad;
    if (sca::exp_taylor(a, b) > std::exp(a) * (1.0 + 1e-12)) ++bad;
    const cvec v = random_cvec(g, 4), vb = random_cvec(g, 4);
    if (sca::trace_taylor(v, vb) > v.squaredNorm() + 1e-12) ++bad;
  }
  return {"taylor_under_estimators", bad == 0, std::to_string(bad) + " violations"};
}

inline CheckResult check_svd(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const cmat H = [&] {
      cmat m(6, 8);
      for (int r = 0; r < 6; ++r) m.row(r) = random_cvec(g, 8).transpose();
      return m;
    }();
    const cvec w = random_cvec(g, 8).normalized();
    const cvec hw = H * w;
    const cmat direct = hw * hw.adjoint();
    const auto form = sca::svd_noise_form(H, w);
    worst = std::max(worst, (sca::reconstruct(form) - direct).norm() / direct.norm());
  }
  std::ostringstream os;
  os << "max relative reconstruction error " << worst;
  return {"svd_identity", worst < 1e-10, os.str()};
}

inline CheckResult check_time_power(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  orchestrator::Problem pb{{2, model::Task{}}, {2, model::UserParams{}}, model::SystemParams{}};
  const auto rz = random_realization(g, 2, 4, 4);
  auto a = model::initial_allocation({2, 4, 4}, pb.tasks, pb.users);
  const auto ris = orchestrator::uniform_states(2, 4, 0);
  orchestrator::detail::update_beamformers(rz, ris, a, pb.params);
  const auto prob = timepower::make_problem(rz, ris, a, pb.tasks, pb.params, pb.users);
  const auto sol = timepower::solve_time_power(prob);
  std::ostringstream os;
  os << "primal " << sol.kkt.primal << ", stationarity " << sol.kkt.stationarity << ", complementarity " << sol.kkt.complementarity;
  const bool ok = sol.feasible && sol.kkt.primal < 1e-9 && sol.kkt.stationarity < 1e-6 && sol.kkt.complementarity < 1e-6;
  return {"time_power_kkt", ok, os.str()};
}

inline CheckResult check_ao_trace(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  orchestrator::Problem pb{{1, model::Task{}}, {1, model::UserParams{}}, model::SystemParams{}};
  const auto rz = random_realization(g, 1, 2, 4);
  const sca::SurrogateBackend backend;
  const auto res = orchestrator::run_baseline(orchestrator::BaselineKind::hybrid, rz, pb, {}, backend);
  bool mono = true;
  for (std::size_t i = 1; i < res.trace.size(); ++i) mono = mono && res.trace[i] <= res.trace[i - 1] * (1.0 + 1e-12);
  return {"ao_trace_non_increasing", res.feasible && mono,
          std::to_string(res.trace.size()) + " recorded costs, final " + std::to_string(res.cost.total_cost)};
}

inline std::vector<CheckResult> run_all(std::uint64_t seed = 7) {
  return {check_mmse(seed),        check_latency_amp(seed + 1), check_count_structure(seed + 2), check_taylor(seed + 3),
          check_svd(seed + 4),     check_time_power(seed + 5),  check_ao_trace(seed + 6)};
}

}  // namespace hris::validate
