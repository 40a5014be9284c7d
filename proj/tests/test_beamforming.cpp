#include <gtest/gtest.h>

#include <random>

#include "hris/validate.hpp"

using namespace hris;
using hris::validate::random_cvec;
using hris::validate::random_realization;
using hris::validate::random_state;

TEST(Mmse, UnitNorm) {
  std::mt19937_64 g(1);
  model::SystemParams pr;
  for (int i = 0; i < 20; ++i) {
    const auto rz = random_realization(g, 2, 5, 4);
    const auto s = random_state(g, 4, pr.rho_cap);
    EXPECT_NEAR(beamforming::mmse_beamformer(rz, s, 0.01, pr, 1).norm(), 1.0, 1e-14);
  }
}

TEST(Mmse, SingleAntennaIsPhaseOnly) {
  std::mt19937_64 g(2);
  model::SystemParams pr;
  const auto rz = random_realization(g, 1, 1, 3);
  const auto s = random_state(g, 3, pr.rho_cap);
  const cvec w = beamforming::mmse_beamformer(rz, s, 0.01, pr, 0);
  EXPECT_NEAR(std::abs(w[0]), 1.0, 1e-15);
  const cvec gk = model::effective_channel(rz, s, 0);
  // |w^H g| = |g|: nothing is lost in the scalar case
  EXPECT_NEAR(std::abs(w.dot(gk)), std::abs(gk[0]), 1e-15 * std::abs(gk[0]));
}

TEST(Mmse, AllPassiveIsMatchedFilter) {
  std::mt19937_64 g(3);
  model::SystemParams pr;
  const auto rz = random_realization(g, 1, 6, 4);
  auto s = random_state(g, 4, pr.rho_cap);
  s.mode.assign(4, 0);
  const cvec w = beamforming::mmse_beamformer(rz, s, 0.01, pr, 0);
  const cvec gk = model::effective_channel(rz, s, 0).normalized();
  EXPECT_NEAR(std::abs(w.dot(gk)), 1.0, 1e-12);
}

TEST(Mmse, DominatesRandomVectors) {
  std::mt19937_64 g(4);
  model::SystemParams pr;
  const auto rz = random_realization(g, 1, 8, 6);
  const auto s = random_state(g, 6, pr.rho_cap);
  const cvec w = beamforming::mmse_beamformer(rz, s, 0.01, pr, 0);
  const double best = model::sinr_gain(rz, s, w, pr, 0);
  for (int i = 0; i < 10000; ++i) {
    const cvec v = random_cvec(g, 8).normalized();
    EXPECT_GE(best - model::sinr_gain(rz, s, v, pr, 0), -1e-9 * best);
  }
}

TEST(Mmse, DirectionIndependentOfPower) {
  std::mt19937_64 g(5);
  model::SystemParams pr;
  const auto rz = random_realization(g, 1, 4, 4);
  const auto s = random_state(g, 4, pr.rho_cap);
  const cvec a = beamforming::mmse_beamformer(rz, s, 1e-3, pr, 0);
  const cvec b = beamforming::mmse_beamformer(rz, s, 1.0, pr, 0);
  EXPECT_NEAR(std::abs(a.dot(b)), 1.0, 1e-10);
}

TEST(Mmse, RejectsNonPositivePower) {
  std::mt19937_64 g(6);
  const auto rz = random_realization(g, 1, 2, 2);
  EXPECT_THROW(beamforming::mmse_beamformer(rz, model::RisState::uniform(2, 0), 0.0, {}, 0), hris::domain_error);
}

TEST(Mmse, CanonicalPhaseMakesFirstEntryReal) {
  cvec w(3);
  w << cplx(0.0, 0.0), cplx(0.0, 2.0), cplx(1.0, 1.0);
  const cvec c = beamforming::canonical_phase(w);
  EXPECT_NEAR(c[1].imag(), 0.0, 1e-15);
  EXPECT_GT(c[1].real(), 0.0);
  EXPECT_NEAR(c.norm(), w.norm(), 1e-15);
}
