#include "bnpfc/gp/kernel.hpp"

namespace bnpfc::gp {

Matrix squared_distances(const Matrix& X) {
  const Vector norms = X.rowwise().squaredNorm();
  Matrix d = -2.0 * X * X.transpose();
  d.colwise() += norms;
  d.rowwise() += norms.transpose();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

Matrix gaussian_kernel_matrix(const Matrix& X, const KernelHyper& hyper) {
  const Eigen::Index T = X.rows();
  Matrix k(T, T);
  for (Eigen::Index s = 0; s < T; ++s) {
    k(s, s) = hyper.xi;
    for (Eigen::Index t = s + 1; t < T; ++t) {
      const double d2 = (X.row(t) - X.row(s)).squaredNorm();
      k(t, s) = k(s, t) = hyper.xi * std::exp(-0.5 * hyper.phi * d2);
    }
  }
  return k;
}

Matrix kernel_from_distances(const Matrix& sqdist, const KernelHyper& hyper) {
  Matrix k = hyper.xi * (-0.5 * hyper.phi * sqdist.array()).exp();
  k.diagonal().array() += hyper.xi * kNugget;
  return k;
}

Vector kernel_cross(const Matrix& X, const Vector& x_new, const KernelHyper& hyper) {
  const Vector d2 = (X.rowwise() - x_new.transpose()).rowwise().squaredNorm();
  return hyper.xi * (-0.5 * hyper.phi * d2.array()).exp();
}

}  // namespace bnpfc::gp
