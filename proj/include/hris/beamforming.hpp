#pragma once

#include "hris/model.hpp"

namespace hris::beamforming {

using model::RisState;
using model::SystemParams;

/// Covariance of the amplified RIS noise plus AP noise,
/// sigma^2 H^H A Lambda Theta Theta^H Lambda^H A^H H + delta^2 I.
inline cmat noise_covariance(const channel::ChannelRealization& realization, const RisState& ris,
                             const SystemParams& params) {
  const int M = realization.antennas();
  cmat R = params.ap_noise_power * cmat::Identity(M, M);
  if (realization.units() > 0) {
    const rvec amp2 = ris.active_coefficients().cwiseAbs2();
    R.noalias() += params.ris_noise_power * realization.h_ris_ap.adjoint() * amp2.asDiagonal() * realization.h_ris_ap;
  }
  return R;
}

/// Rotates `w` so that its first non-negligible entry is real and positive.
inline cvec canonical_phase(cvec w) {
  const double scale = w.norm();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w[i]) > 1e-12 * scale) {
      w *= std::conj(w[i]) / std::abs(w[i]);
      w[i] = cplx(w[i].real(), 0.0);
      break;
    }
  }
  return w;
}

/// Linear MMSE receive vector for user k:
///   normalize([g g^H + (sigma^2/p) H^H A Lambda^2 A H + (delta^2/p) I]^{-1} g).
/// The regularized matrix is Hermitian positive definite for delta^2 > 0 and
/// is factorized rather than inverted.
inline cvec mmse_beamformer(const channel::ChannelRealization& realization, const RisState& ris, double p,
                            const SystemParams& params, int k) {
  if (!(p > 0.0)) throw domain_error("mmse_beamformer: transmit power must be positive");
  const int M = realization.antennas();
  const cvec g = model::effective_channel(realization, ris, k);
  if (g.norm() == 0.0) {
    cvec e = cvec::Zero(M);
    e[0] = 1.0;
    return e;
  }
  cmat Q = noise_covariance(realization, ris, params) / p;
  Q.noalias() += g * g.adjoint();
  Eigen::LLT<cmat> llt(Q);
  cvec w = llt.solve(g);
  if (llt.info() != Eigen::Success || !w.allFinite()) {
    // Fallback for severely ill-conditioned cases.
    w = Q.ldlt().solve(g);
  }
  w.normalize();
  return canonical_phase(std::move(w));
}

}  // namespace hris::beamforming
