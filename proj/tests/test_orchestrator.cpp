#include <gtest/gtest.h>

#include "support.hpp"

using namespace hris;
using namespace hris::orchestrator;

namespace {

channel::ChannelRealization draw(const config::ExperimentConfig& cfg, std::uint64_t seed) {
  return channel::sample_channels(cfg.geometry, cfg.path_loss, cfg.dims, seed, cfg.fading);
}

bool non_increasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] > trace[i - 1]) return false;
  return true;
}

config::ExperimentConfig toy_config() {
  config::ExperimentConfig cfg;
  cfg.dims = {1, 1, 2};
  return cfg;
}

}  // namespace

TEST(Ao, DefaultScenarioTraceIsMonotoneAndConverges) {
  const config::ExperimentConfig cfg;
  const sca::SurrogateBackend backend;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto res = alternating_optimize(draw(cfg, seed), cfg.problem(), cfg.convergence, backend);
    ASSERT_TRUE(res.feasible) << res.message;
    EXPECT_TRUE(non_increasing(res.trace));
    EXPECT_TRUE(res.converged);
    EXPECT_LE(res.iterations, cfg.convergence.l_max);
    EXPECT_TRUE(model::check_feasibility(res.alloc, res.ris, draw(cfg, seed), cfg.problem().tasks, cfg.system,
                                         cfg.problem().users)
                    .ok());
  }
}

TEST(Ao, RestartFromOptimumIsAFixedPoint) {
  const config::ExperimentConfig cfg;
  const sca::SurrogateBackend backend;
  const auto rz = draw(cfg, 7);
  const auto first = alternating_optimize(rz, cfg.problem(), cfg.convergence, backend);
  ASSERT_TRUE(first.feasible);
  auto opt = cfg.convergence;
  opt.l_max = 1;
  const auto again = alternating_optimize(rz, cfg.problem(), opt, backend, &first);
  ASSERT_TRUE(again.feasible);
  EXPECT_LE(first.cost.total_cost - again.cost.total_cost, cfg.convergence.epsilon);
  EXPECT_LE(again.cost.total_cost, first.cost.total_cost);
}

TEST(Ao, InfeasibleInitializationIsReported) {
  config::ExperimentConfig cfg;
  cfg.user.t_max = 1e-6;  // neither local computing nor offloading fits
  const auto res = alternating_optimize(draw(cfg, 1), cfg.problem(), cfg.convergence, sca::SurrogateBackend{});
  EXPECT_FALSE(res.feasible);
  EXPECT_NE(res.message.find("C"), std::string::npos) << res.message;
}

TEST(Baselines, FrozenVariablesStayFrozen) {
  const config::ExperimentConfig cfg;
  const sca::SurrogateBackend backend;
  const auto rz = draw(cfg, 2);
  const auto act = run_baseline(BaselineKind::fully_active, rz, cfg.problem(), cfg.convergence, backend);
  const auto pas = run_baseline(BaselineKind::fully_passive, rz, cfg.problem(), cfg.convergence, backend);
  const auto loc = run_baseline(BaselineKind::fully_local, rz, cfg.problem(), cfg.convergence, backend);
  const auto off = run_baseline(BaselineKind::fully_offloading, rz, cfg.problem(), cfg.convergence, backend);
  ASSERT_TRUE(act.feasible && pas.feasible && loc.feasible);
  for (const auto& s : act.ris) EXPECT_EQ(s.n_active(), cfg.dims.units);
  for (int k = 0; k < cfg.dims.users; ++k) {
    EXPECT_EQ(pas.ris[k].n_active(), 0);
    const auto pw = model::ris_power(pas.ris[k], pas.alloc.p[k], rz.h_user_ris[k], cfg.system);
    EXPECT_EQ(pw.amplification, 0.0);
    EXPECT_EQ(loc.alloc.beta[k], 0.0);
    if (off.feasible) { EXPECT_EQ(off.alloc.beta[k], 1.0); }
  }
  if (!off.feasible) { EXPECT_FALSE(off.message.empty()); }
}

TEST(Baselines, HybridNoWorseThanPureModes) {
  const config::ExperimentConfig cfg;
  const sca::SurrogateBackend backend;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto rz = draw(cfg, seed);
    const auto hyb = run_baseline(BaselineKind::hybrid, rz, cfg.problem(), cfg.convergence, backend);
    const auto act = run_baseline(BaselineKind::fully_active, rz, cfg.problem(), cfg.convergence, backend);
    const auto pas = run_baseline(BaselineKind::fully_passive, rz, cfg.problem(), cfg.convergence, backend);
    ASSERT_TRUE(hyb.feasible);
    double best = std::numeric_limits<double>::infinity();
    if (act.feasible) best = std::min(best, act.cost.total_cost);
    if (pas.feasible) best = std::min(best, pas.cost.total_cost);
    EXPECT_LE(hyb.cost.total_cost, best + 1e-9);
  }
}

TEST(Baselines, LocalComputingIgnoresRisBudget) {
  config::ExperimentConfig cfg;
  const sca::SurrogateBackend backend;
  const auto rz = draw(cfg, 4);
  std::vector<double> costs;
  for (double dbm : {0.0, 10.0, 20.0}) {
    cfg.system.p_ris_max = dbm_to_watt(dbm);
    costs.push_back(run_baseline(BaselineKind::fully_local, rz, cfg.problem(), cfg.convergence, backend).cost.total_cost);
  }
  EXPECT_DOUBLE_EQ(costs[0], costs[1]);
  EXPECT_DOUBLE_EQ(costs[1], costs[2]);
}

TEST(Baselines, NamesRoundTrip) {
  for (auto k : {BaselineKind::hybrid, BaselineKind::fully_active, BaselineKind::fully_passive, BaselineKind::fully_local,
                 BaselineKind::fully_offloading})
    EXPECT_EQ(parse_baseline(baseline_name(k)), k);
  EXPECT_FALSE(parse_baseline("half_active").has_value());
}

TEST(Oracle, Census) {
  OracleGrids g;
  g.phase_levels = 4;
  const double n_rho = 27.0;  // 1, 1.5, ..., 14
  EXPECT_DOUBLE_EQ(oracle_census(1, g, 14.0), 8.0 * n_rho * g.beta_levels * g.power_levels);
}

TEST(Oracle, RefusesLargeInstances) {
  config::ExperimentConfig cfg;
  cfg.dims = {1, 1, 5};
  EXPECT_THROW(brute_force_oracle(draw(cfg, 1), cfg.problem(), {}), unsupported_configuration);
  cfg.dims = {1, 1, 4};
  OracleGrids g;
  g.budget = 1e3;
  try {
    brute_force_oracle(draw(cfg, 1), cfg.problem(), g);
    FAIL() << "expected refusal";
  } catch (const std::length_error& e) {
    EXPECT_NE(std::string(e.what()).find("exceeds budget"), std::string::npos);
  }
}

TEST(Oracle, PassiveOptimumFollowsAlignedPhases) {
  auto cfg = toy_config();
  cfg.fading = channel::Fading::los;
  const auto rz0 = draw(cfg, 3);
  auto rz = rz0;
  rz.h_direct[0].setZero();
  auto pb = cfg.problem();
  pb.params.p_ris_max = 1e-12;  // no amplification affordable: passive only
  pb.tasks[0].c_cycles = 1e12;  // local computing cannot finish, so the link matters
  pb.tasks[0].s_bits = 100.0;
  OracleGrids g;
  g.phase_levels = 16;
  const auto res = brute_force_oracle(rz, pb, g);
  ASSERT_TRUE(res.feasible);
  ASSERT_EQ(res.ris[0].n_active(), 0);
  const rvec ref = closedform::aligned_phases(rz.h_ris_ap.col(0), rz.h_user_ris[0]);
  // only the phase difference between the two units matters
  const double got = closedform::wrap_phase(res.ris[0].phase[1] - res.ris[0].phase[0] + kPi) - kPi;
  const double want = closedform::wrap_phase(ref[1] - ref[0] + kPi) - kPi;
  EXPECT_LE(std::abs(closedform::wrap_phase(got - want + kPi) - kPi), 2.0 * kPi / g.phase_levels);
}

TEST(Oracle, ToyAoWithinFivePercent) {
  const auto cfg = toy_config();
  const sca::SurrogateBackend backend;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto rz = draw(cfg, seed);
    const auto ao = run_baseline(BaselineKind::hybrid, rz, cfg.problem(), cfg.convergence, backend);
    const auto oracle = brute_force_oracle(rz, cfg.problem(), cfg.oracle);
    ASSERT_TRUE(ao.feasible && oracle.feasible);
    EXPECT_LE(ao.cost.total_cost, oracle.cost * 1.05) << "seed " << seed;
  }
}
