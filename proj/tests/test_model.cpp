#include <gtest/gtest.h>

#include <random>

#include "hris/validate.hpp"

using namespace hris;
using namespace hris::model;
using hris::validate::random_cvec;
using hris::validate::random_realization;
using hris::validate::random_state;

namespace {

// Direct transcription of the SINR definition, sharing no code with the model.
double sinr_direct(const channel::ChannelRealization& rz, const RisState& s, const cvec& w, double p, const SystemParams& pr, int k) {
  const int N = rz.units();
  cmat Lambda = cmat::Zero(N, N), A = cmat::Zero(N, N), Theta = cmat::Zero(N, N);
  for (int n = 0; n < N; ++n) {
    Lambda(n, n) = s.mode[n] ? s.amplification[n] : 1.0;
    A(n, n) = s.mode[n];
    Theta(n, n) = std::exp(cplx(0.0, s.phase[n]));
  }
  const cmat H = rz.h_ris_ap.adjoint();  // M x N
  const cplx sig = w.adjoint() * (rz.h_direct[k] + H * Lambda * Theta * rz.h_user_ris[k]);
  const cmat nz = w.adjoint() * H * A * Lambda * Theta;
  return p * std::norm(sig) / (pr.ris_noise_power * nz.squaredNorm() + pr.ap_noise_power);
}

Allocation random_allocation(std::mt19937_64& g, int K, int M) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Allocation a;
  a.t.resize(K);
  a.p.resize(K);
  a.beta.resize(K);
  a.f_local.resize(K);
  for (int k = 0; k < K; ++k) {
    a.t[k] = 0.5 * u(g);
    a.p[k] = 0.01 * u(g);
    a.beta[k] = u(g);
    a.f_local[k] = 1e9 * u(g);
    a.beamformer.push_back(random_cvec(g, M).normalized());
  }
  return a;
}

}  // namespace

TEST(LocalCompute, FullOffloadCostsNothing) {
  const auto c = local_compute(Task{}, 1.0, 1e9, 1e-28);
  EXPECT_EQ(c.time, 0.0);
  EXPECT_EQ(c.energy, 0.0);
}

TEST(LocalCompute, HalfSplitHandArithmetic) {
  const auto c = local_compute(Task{1e6, 4e7}, 0.5, 1e9, 1e-28);
  EXPECT_NEAR(c.time, 0.02, 1e-15);
  EXPECT_NEAR(c.energy, 2e-3, 1e-15);
}

TEST(LocalCompute, ZeroFrequencyWithWorkIsInfiniteTime) {
  EXPECT_TRUE(std::isinf(local_compute(Task{}, 0.2, 0.0, 1e-28).time));
}

TEST(EffectiveChannel, NoUnitsGivesDirectLink) {
  std::mt19937_64 g(1);
  auto rz = random_realization(g, 1, 3, 0);
  EXPECT_EQ(effective_channel(rz, RisState::uniform(0, 0), 0), rz.h_direct[0]);
}

TEST(EffectiveChannel, AlignedSingleUnitAddsCoherently) {
  channel::ChannelRealization rz;
  rz.h_direct = {cvec::Constant(1, std::polar(0.3, 0.4))};
  rz.h_user_ris = {cvec::Constant(1, std::polar(0.5, 1.1))};
  rz.h_ris_ap = cmat::Constant(1, 1, std::polar(0.2, -0.7));
  // cascade = conj(h_ris_ap) e^{j theta} h_r; align with the direct phase
  const double theta = 0.4 - (0.7 + 1.1);
  const auto s = RisState::uniform(1, 0, 1.0, theta);
  EXPECT_NEAR(std::abs(effective_channel(rz, s, 0)[0]), 0.3 + 0.2 * 0.5, 1e-15);
}

TEST(EffectiveChannel, DoublingRhoDoublesActiveContribution) {
  std::mt19937_64 g(2);
  const auto rz = random_realization(g, 1, 4, 5);
  auto s = random_state(g, 5, 7.0);
  s.mode = {1, 0, 1, 0, 0};
  auto s2 = s;
  for (int n = 0; n < 5; ++n)
    if (s.mode[n]) s2.amplification[n] *= 2.0;
  // zero-magnitude coefficients remove the active units from the cascade
  auto passive_only = s;
  for (int n = 0; n < 5; ++n)
    if (s.mode[n]) passive_only.mode[n] = 1, passive_only.amplification[n] = 0.0;
  const cvec base = effective_channel(rz, passive_only, 0);
  const cvec c1 = effective_channel(rz, s, 0) - base;
  const cvec c2 = effective_channel(rz, s2, 0) - base;
  EXPECT_LT((c2 - 2.0 * c1).norm(), 1e-12 * c1.norm());
}

TEST(Sinr, ZeroPowerZeroSinr) {
  std::mt19937_64 g(3);
  const auto rz = random_realization(g, 1, 2, 3);
  auto a = random_allocation(g, 1, 2);
  a.p[0] = 0.0;
  EXPECT_EQ(sinr(rz, random_state(g, 3, 14.0), a, SystemParams{}, 0), 0.0);
}

TEST(Sinr, AllPassiveDenominatorIsApNoise) {
  std::mt19937_64 g(4);
  const auto rz = random_realization(g, 1, 3, 4);
  auto s = random_state(g, 4, 14.0);
  s.mode.assign(4, 0);
  const auto parts = sinr_parts(rz, s, random_cvec(g, 3).normalized(), SystemParams{}, 0);
  EXPECT_EQ(parts.noise, SystemParams{}.ap_noise_power);
}

TEST(Sinr, MatchesDirectEvaluation) {
  std::mt19937_64 g(5);
  SystemParams pr;
  for (int trial = 0; trial < 50; ++trial) {
    const auto rz = random_realization(g, 2, 4, 6);
    const auto s = random_state(g, 6, pr.rho_cap);
    const auto a = random_allocation(g, 2, 4);
    for (int k = 0; k < 2; ++k) {
      const double ref = sinr_direct(rz, s, a.beamformer[k], a.p[k], pr, k);
      EXPECT_NEAR(sinr(rz, s, a, pr, k), ref, 1e-12 * ref);
    }
  }
}

TEST(Rate, HandValues) {
  SystemParams pr;
  EXPECT_EQ(rate(pr, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(rate(pr, 1.0), 1e6);
  EXPECT_DOUBLE_EQ(rate(pr, 3.0), 2e6);
}

TEST(RisPower, AllPassive) {
  SystemParams pr;
  const auto pw = ris_power(RisState::uniform(6, 0), 0.01, cvec::Ones(6), pr);
  EXPECT_EQ(pw.active, 0.0);
  EXPECT_EQ(pw.amplification, 0.0);
  EXPECT_DOUBLE_EQ(pw.passive, 6 * pr.p_circuit);
}

TEST(RisPower, AllActiveUnitAmplification) {
  std::mt19937_64 g(6);
  SystemParams pr;
  const cvec hr = random_cvec(g, 6, 0.3);
  const auto pw = ris_power(RisState::uniform(6, 1, 1.0, 0.9), 0.01, hr, pr);
  EXPECT_NEAR(pw.amplification, 0.01 * hr.squaredNorm() + 6 * pr.ris_noise_power, 1e-18);
  EXPECT_NEAR(pw.active, 6 * (pr.p_circuit + pr.p_dc) + pw.amplification, 1e-18);
}

TEST(RisPower, DefaultScenarioCircuitValues) {
  SystemParams pr;
  EXPECT_NEAR(pr.p_circuit, dbm_to_watt(-10.0), 1e-18);
  EXPECT_NEAR(pr.p_dc, 3.162e-4, 1e-7);
}

TEST(TotalCost, LatencyOnlyWeights) {
  std::mt19937_64 g(7);
  SystemParams pr;
  pr.tradeoff = {1.0};
  const auto rz = random_realization(g, 2, 2, 3);
  const auto a = random_allocation(g, 2, 2);
  const std::vector<RisState> ris(2, random_state(g, 3, 14.0));
  const auto c = total_cost(a, ris, rz, {2, Task{}}, pr, {2, UserParams{}});
  EXPECT_DOUBLE_EQ(c.total_cost, a.t.sum());
}

TEST(TotalCost, EnergyOnlyAtZeroTimeFullOffload) {
  std::mt19937_64 g(8);
  SystemParams pr;
  pr.tradeoff = {0.0};
  const auto rz = random_realization(g, 1, 2, 3);
  auto a = random_allocation(g, 1, 2);
  a.t[0] = 0.0;
  a.beta[0] = 1.0;
  const auto c = total_cost(a, {random_state(g, 3, 14.0)}, rz, {Task{}}, pr, {UserParams{}});
  EXPECT_EQ(c.total_cost, 0.0);
}

TEST(TotalCost, SumOfParts) {
  std::mt19937_64 g(9);
  SystemParams pr;
  pr.tradeoff = {0.3, 0.8};
  pr.energy_scale = 2.5;
  for (int trial = 0; trial < 20; ++trial) {
    const auto rz = random_realization(g, 2, 3, 4);
    const auto a = random_allocation(g, 2, 3);
    const std::vector<RisState> ris{random_state(g, 4, 14.0), random_state(g, 4, 14.0)};
    const auto c = total_cost(a, ris, rz, {2, Task{}}, pr, {2, UserParams{}});
    double manual = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double w = pr.tradeoff[k];
      manual += w * a.t[k] + (1 - w) * 2.5 * (c.e_transmit[k] + c.e_local[k] + c.e_active[k] + c.e_passive[k]);
    }
    EXPECT_NEAR(c.total_cost, manual, 1e-12 * std::abs(manual));
  }
}

TEST(Feasibility, NoOffloadingPointIsFeasible) {
  std::mt19937_64 g(10);
  const auto rz = random_realization(g, 1, 2, 3);
  Allocation a;
  a.t = rvec::Constant(1, 0.5);
  a.p = rvec::Zero(1);
  a.beta = rvec::Zero(1);
  a.f_local = rvec::Constant(1, 1e9);
  a.beamformer = {cvec::Unit(2, 0)};
  SystemParams pr;
  const auto rep = check_feasibility(a, {RisState::uniform(3, 0)}, rz, {Task{}}, pr, {UserParams{}});
  EXPECT_TRUE(rep.ok());
  EXPECT_DOUBLE_EQ(rep.users[0].raw[C2], pr.p_ris_max);
  EXPECT_TRUE(rep.first_violation().empty());
}

TEST(Feasibility, ReportsViolatedConstraint) {
  std::mt19937_64 g(11);
  const auto rz = random_realization(g, 1, 2, 3);
  Allocation a;
  a.t = rvec::Constant(1, 0.5);
  a.p = rvec::Constant(1, 1.0);  // 0.5 J > E_max
  a.beta = rvec::Zero(1);
  a.f_local = rvec::Constant(1, 1e9);
  a.beamformer = {cvec::Unit(2, 0)};
  const auto rep = check_feasibility(a, {RisState::uniform(3, 0)}, rz, {Task{}}, SystemParams{}, {UserParams{}});
  EXPECT_FALSE(rep.ok());
  EXPECT_EQ(rep.first_violation(), "user 0: C1");
}

TEST(Initialization, MeetsEnergyBudgetWithEquality) {
  const std::vector<Task> tasks(2, Task{});
  const std::vector<UserParams> users(2, UserParams{});
  const auto a = initial_allocation({2, 4, 3}, tasks, users);
  for (int k = 0; k < 2; ++k) {
    EXPECT_DOUBLE_EQ(a.t[k], 0.25);
    EXPECT_DOUBLE_EQ(a.beta[k], 0.5);
    const double e = a.t[k] * a.p[k] + local_compute(tasks[k], 0.5, 1e9, 1e-28).energy;
    EXPECT_NEAR(e, users[k].e_max, 1e-15);
  }
}
