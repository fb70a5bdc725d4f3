#pragma once

#include "bnpfc/core/linalg.hpp"

namespace bnpfc::gp {

/// Amplitude xi and inverse bandwidth phi of the Gaussian kernel, both in (0, 1).
struct KernelHyper {
  double xi = 0.5;
  double phi = 0.5;
};

/// Relative nugget added to the kernel diagonal wherever the kernel is used as
/// a covariance (training, prediction and their oracles alike).
inline constexpr double kNugget = 1e-8;

/// K[t, s] = xi * exp(-(phi / 2) * ||x_t - x_s||^2), no nugget.
Matrix gaussian_kernel_matrix(const Matrix& X, const KernelHyper& hyper);

/// Pairwise squared Euclidean distances between rows of X.
Matrix squared_distances(const Matrix& X);

/// Kernel from cached squared distances, with the nugget xi * kNugget on the diagonal.
Matrix kernel_from_distances(const Matrix& sqdist, const KernelHyper& hyper);

/// k(x_t, x_new) for every training row.
Vector kernel_cross(const Matrix& X, const Vector& x_new, const KernelHyper& hyper);

}  // namespace bnpfc::gp
