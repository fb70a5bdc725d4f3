#pragma once

#include "bnpfc/core/linalg.hpp"
#include "bnpfc/gp/projection.hpp"

namespace bnpfc::gp {

/// K1 = (K^{-1} + (I - Phi0) / tau2)^{-1}.
///
/// Evaluated as K - K P (tau2 I + P K P + c B B')^{-1} P K with P = I - Phi0
/// and c = max diag(K): the added term only touches the range of B, which P
/// annihilates, so the result is unchanged while the factorized matrix stays
/// well conditioned as tau2 -> 0.
Matrix subspace_kernel(const Matrix& K, const Projection& proj, double tau2);

/// The tau2 -> 0 limit is K1 = Q M Q' with M = (Q' K^{-1} Q)^{-1}, Q = proj.basis.
/// Returns the precision Q' K^{-1} Q.
Matrix linear_limit_precision(const SpdFactor& k_factor, const Projection& proj);

inline double omega_from_tau2(double tau2) { return 1.0 / (1.0 + tau2); }

}  // namespace bnpfc::gp
