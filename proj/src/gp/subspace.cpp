#include "bnpfc/gp/subspace.hpp"

#include <cmath>

namespace bnpfc::gp {

Matrix subspace_kernel(const Matrix& K, const Projection& proj, double tau2) {
  if (std::isinf(tau2)) return K;
  const Matrix& Q = proj.basis;
  const double c = K.diagonal().maxCoeff();

  Matrix pk = K;
  pk.noalias() -= Q * (Q.transpose() * K);
  Matrix a = pk;
  a.noalias() -= (pk * Q) * Q.transpose();
  a.noalias() += c * Q * Q.transpose();
  a.diagonal().array() += tau2;
  a = 0.5 * (a + a.transpose()).eval();

  const SpdFactor factor = factorize_spd(a, c + tau2, 0.0);
  factor.llt.matrixL().solveInPlace(pk);
  Matrix k1 = K;
  k1.selfadjointView<Eigen::Lower>().rankUpdate(pk.transpose(), -1.0);
  k1.triangularView<Eigen::StrictlyUpper>() = k1.transpose();
  return k1;
}

Matrix linear_limit_precision(const SpdFactor& k_factor, const Projection& proj) {
  const Matrix w = k_factor.llt.matrixL().solve(proj.basis);
  return w.transpose() * w;
}

}  // namespace bnpfc::gp
