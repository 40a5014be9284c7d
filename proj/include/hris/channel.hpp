#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hris/rng.hpp"
#include "hris/types.hpp"

namespace hris::channel {

using Point = std::array<double, 2>;

struct Circle {
  Point center{50.0, 0.0};
  double radius = 10.0;
};

/// Node layout. When `user_positions` is empty, users are drawn uniformly
/// inside `user_circle` for every realization.
struct Geometry {
  Point ap_position{0.0, 0.0};
  Point ris_position{50.0, 20.0};
  std::vector<Point> user_positions;
  Circle user_circle;
};

/// A(d) = a0 (d/d0)^(-exponent), one exponent per link.
struct PathLossModel {
  double a0 = 1e-3;
  double d0 = 1.0;
  double exponent_ap_ris = 2.6;
  double exponent_ris_user = 2.2;
  double exponent_ap_user = 3.2;
};

enum class Fading { rayleigh, los };

/// One frame of channels. `h_ris_ap` is N x M; user-indexed vectors have K entries.
struct ChannelRealization {
  std::vector<cvec> h_direct;    // M-vectors, user -> AP
  std::vector<cvec> h_user_ris;  // N-vectors, user -> RIS
  cmat h_ris_ap;                 // N x M, RIS -> AP
  std::uint64_t seed = 0;

  int users() const { return static_cast<int>(h_direct.size()); }
  int antennas() const { return static_cast<int>(h_ris_ap.cols()); }
  int units() const { return static_cast<int>(h_ris_ap.rows()); }
};

inline double distance(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

inline double path_loss_gain(double d, const PathLossModel& model, double exponent) {
  if (!(d > 0.0)) throw domain_error("path_loss_gain: distance must be positive");
  if (!(model.a0 > 0.0) || !(model.d0 > 0.0) || !(exponent > 0.0))
    throw domain_error("path_loss_gain: a0, d0 and exponent must be positive");
  return model.a0 * std::pow(d / model.d0, -exponent);
}

/// Uniform placement inside the circle (area-uniform radius).
inline std::vector<Point> place_users(const Geometry& geometry, int users, std::uint64_t seed) {
  if (!geometry.user_positions.empty()) {
    if (static_cast<int>(geometry.user_positions.size()) < users)
      throw std::invalid_argument("place_users: fewer explicit user positions than users");
    return {geometry.user_positions.begin(), geometry.user_positions.begin() + users};
  }
  if (geometry.user_circle.radius < 0.0) throw domain_error("place_users: negative radius");
  std::vector<Point> out;
  out.reserve(users);
  for (int k = 0; k < users; ++k) {
    auto gen = rng::stream(seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(rng::Link::placement)});
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = geometry.user_circle.radius * std::sqrt(unit(gen));
    const double phi = 2.0 * kPi * unit(gen);
    out.push_back({geometry.user_circle.center[0] + r * std::cos(phi), geometry.user_circle.center[1] + r * std::sin(phi)});
  }
  return out;
}

namespace detail {

inline cvec draw(std::uint64_t seed, std::uint64_t user, rng::Link link, int len, double gain, Fading fading) {
  auto gen = rng::stream(seed, {user, static_cast<std::uint64_t>(link)});
  const double amp = std::sqrt(gain);
  cvec out(len);
  if (fading == Fading::rayleigh) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double s = amp / std::sqrt(2.0);
    for (int i = 0; i < len; ++i) {
      const double re = normal(gen);
      const double im = normal(gen);
      out[i] = cplx(s * re, s * im);
    }
  } else {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    for (int i = 0; i < len; ++i) out[i] = std::polar(amp, phase(gen));
  }
  return out;
}

}  // namespace detail

/// Draws the direct, user-RIS and RIS-AP channels for `dims`. Every link of
/// every user has its own stream derived from `seed`, so the first K users'
/// channels do not change when K grows.
inline ChannelRealization sample_channels(const Geometry& geometry, const PathLossModel& model, const Dimensions& dims,
                                          std::uint64_t seed, Fading fading) {
  if (dims.users <= 0 || dims.antennas <= 0 || dims.units < 0)
    throw std::invalid_argument("sample_channels: K, M must be positive and N non-negative");
  const auto users = place_users(geometry, dims.users, seed);

  ChannelRealization out;
  out.seed = seed;
  const double g_ris_ap = path_loss_gain(distance(geometry.ap_position, geometry.ris_position), model, model.exponent_ap_ris);
  // The RIS-AP link is shared by all users; its stream uses a reserved user index.
  const cvec flat = detail::draw(seed, ~std::uint64_t{0}, rng::Link::ris_ap, dims.units * dims.antennas, g_ris_ap, fading);
  out.h_ris_ap = Eigen::Map<const cmat>(flat.data(), dims.units, dims.antennas);

  for (int k = 0; k < dims.users; ++k) {
    const auto uk = static_cast<std::uint64_t>(k);
    const double g_d = path_loss_gain(distance(users[k], geometry.ap_position), model, model.exponent_ap_user);
    const double g_r = path_loss_gain(distance(users[k], geometry.ris_position), model, model.exponent_ris_user);
    out.h_direct.push_back(detail::draw(seed, uk, rng::Link::ap_user, dims.antennas, g_d, fading));
    out.h_user_ris.push_back(detail::draw(seed, uk, rng::Link::ris_user, dims.units, g_r, fading));
  }
  return out;
}

/// Element-wise minimum magnitudes (|h|, |h_r,k|) for the single-antenna case.
struct MinGains {
  double ris_ap = 0.0;
  double user_ris = 0.0;
};

inline MinGains min_gains(const ChannelRealization& realization, int user) {
  if (realization.antennas() != 1) throw unsupported_configuration("min_gains: requires a single-antenna AP (M = 1)");
  if (realization.units() == 0) throw std::invalid_argument("min_gains: no RIS units");
  return {realization.h_ris_ap.col(0).cwiseAbs().minCoeff(), realization.h_user_ris.at(user).cwiseAbs().minCoeff()};
}

}  // namespace hris::channel
