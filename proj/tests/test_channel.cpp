#include <gtest/gtest.h>

#include "hris/channel.hpp"

using namespace hris;
using namespace hris::channel;

TEST(PathLoss, ReferenceDistanceReturnsA0) {
  PathLossModel m;
  EXPECT_DOUBLE_EQ(path_loss_gain(1.0, m, 2.2), 1e-3);
}

TEST(PathLoss, MinusThirtyDecibels) { EXPECT_NEAR(db_to_linear(-30.0), 1e-3, 1e-18); }

TEST(PathLoss, FiftyMetres) {
  PathLossModel m;
  EXPECT_NEAR(path_loss_gain(50.0, m, 2.2), 1e-3 * std::pow(50.0, -2.2), 1e-20);
  EXPECT_NEAR(path_loss_gain(50.0, m, 2.2), 1.83e-7, 0.01e-7);
}

TEST(PathLoss, RejectsNonPositiveDistance) {
  EXPECT_THROW(path_loss_gain(0.0, PathLossModel{}, 2.2), hris::domain_error);
  EXPECT_THROW(path_loss_gain(-1.0, PathLossModel{}, 2.2), hris::domain_error);
}

TEST(Sampling, SameSeedSameRealization) {
  const Dimensions d{2, 8, 6};
  const auto a = sample_channels(Geometry{}, PathLossModel{}, d, 42, Fading::rayleigh);
  const auto b = sample_channels(Geometry{}, PathLossModel{}, d, 42, Fading::rayleigh);
  EXPECT_EQ(a.h_ris_ap, b.h_ris_ap);
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(a.h_direct[k], b.h_direct[k]);
    EXPECT_EQ(a.h_user_ris[k], b.h_user_ris[k]);
  }
  const auto c = sample_channels(Geometry{}, PathLossModel{}, d, 43, Fading::rayleigh);
  EXPECT_NE(a.h_ris_ap, c.h_ris_ap);
}

TEST(Sampling, ShapesFollowDimensions) {
  const auto rz = sample_channels(Geometry{}, PathLossModel{}, {3, 4, 5}, 1, Fading::rayleigh);
  EXPECT_EQ(rz.users(), 3);
  EXPECT_EQ(rz.antennas(), 4);
  EXPECT_EQ(rz.units(), 5);
  EXPECT_EQ(rz.h_user_ris[2].size(), 5);
  EXPECT_EQ(rz.h_direct[2].size(), 4);
}

TEST(Sampling, LosEntriesHavePathLossMagnitude) {
  Geometry g;
  g.user_positions = {{45.0, 3.0}};
  PathLossModel m;
  const auto rz = sample_channels(g, m, {1, 3, 4}, 9, Fading::los);
  const double g_ra = std::sqrt(path_loss_gain(distance(g.ap_position, g.ris_position), m, m.exponent_ap_ris));
  const double g_ur = std::sqrt(path_loss_gain(distance(g.user_positions[0], g.ris_position), m, m.exponent_ris_user));
  const double g_d = std::sqrt(path_loss_gain(distance(g.user_positions[0], g.ap_position), m, m.exponent_ap_user));
  for (Eigen::Index i = 0; i < rz.h_ris_ap.size(); ++i) EXPECT_NEAR(std::abs(rz.h_ris_ap.data()[i]), g_ra, 1e-15 * g_ra);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(rz.h_user_ris[0][i]), g_ur, 1e-15 * g_ur);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(rz.h_direct[0][i]), g_d, 1e-15 * g_d);
}

TEST(Sampling, RayleighPowerMatchesPathLoss) {
  Geometry g;
  g.user_positions = {{50.0, 0.0}};
  PathLossModel m;
  const double expected = path_loss_gain(distance(g.user_positions[0], g.ris_position), m, m.exponent_ris_user);
  double acc = 0.0;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    const auto rz = sample_channels(g, m, {1, 1, 1}, static_cast<std::uint64_t>(s), Fading::rayleigh);
    acc += std::norm(rz.h_user_ris[0][0]);
  }
  EXPECT_NEAR(acc / draws / expected, 1.0, 0.05);
}

TEST(Sampling, UsersStayInsideCircle) {
  Geometry g;
  for (std::uint64_t s = 0; s < 200; ++s) {
    for (const auto& p : place_users(g, 4, s)) EXPECT_LE(distance(p, g.user_circle.center), g.user_circle.radius + 1e-12);
  }
}

TEST(Sampling, AddingUsersKeepsEarlierChannels) {
  const auto a = sample_channels(Geometry{}, PathLossModel{}, {1, 2, 3}, 5, Fading::rayleigh);
  const auto b = sample_channels(Geometry{}, PathLossModel{}, {3, 2, 3}, 5, Fading::rayleigh);
  EXPECT_EQ(a.h_direct[0], b.h_direct[0]);
  EXPECT_EQ(a.h_user_ris[0], b.h_user_ris[0]);
  EXPECT_EQ(a.h_ris_ap, b.h_ris_ap);
}

TEST(MinGains, EqualMagnitudes) {
  ChannelRealization rz;
  rz.h_ris_ap = cmat::Constant(3, 1, cplx(0.0, 0.3));
  rz.h_user_ris = {cvec::Constant(3, cplx(0.3, 0.0))};
  rz.h_direct = {cvec::Zero(1)};
  const auto g = min_gains(rz, 0);
  EXPECT_DOUBLE_EQ(g.ris_ap, 0.3);
  EXPECT_DOUBLE_EQ(g.user_ris, 0.3);
}

TEST(MinGains, ExplicitMinimum) {
  ChannelRealization rz;
  rz.h_ris_ap.resize(3, 1);
  rz.h_ris_ap << 1.0, 0.5, 2.0;
  rz.h_user_ris = {cvec::Ones(3)};
  rz.h_direct = {cvec::Zero(1)};
  EXPECT_DOUBLE_EQ(min_gains(rz, 0).ris_ap, 0.5);
}

TEST(MinGains, BoundsEveryElement) {
  Geometry g;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto rz = sample_channels(g, PathLossModel{}, {2, 1, 6}, s, Fading::rayleigh);
    for (int k = 0; k < 2; ++k) {
      const auto mg = min_gains(rz, k);
      for (int n = 0; n < 6; ++n) {
        EXPECT_LE(mg.ris_ap, std::abs(rz.h_ris_ap(n, 0)));
        EXPECT_LE(mg.user_ris, std::abs(rz.h_user_ris[k][n]));
      }
    }
  }
}

TEST(MinGains, RequiresSingleAntenna) {
  const auto rz = sample_channels(Geometry{}, PathLossModel{}, {1, 2, 3}, 1, Fading::los);
  EXPECT_THROW(min_gains(rz, 0), unsupported_configuration);
}
