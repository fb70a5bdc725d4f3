#include "bnpfc/gp/projection.hpp"

#include <string>

#include "bnpfc/core/errors.hpp"

namespace bnpfc::gp {

Projection projection_matrix(const Matrix& X, const ProjectionOptions& options) {
  const Eigen::Index T = X.rows();
  const Eigen::Index K = X.cols();
  Projection proj;
  if (options.force_pcs || K >= T) {
    const Eigen::Index r = std::min<Eigen::Index>(options.n_pcs, std::min(T, K));
    proj.pcs = data::principal_components(X, r);
    proj.design = proj.pcs->scores;
  } else {
    proj.design = X;
  }
  const Eigen::Index c = proj.design.cols();
  Eigen::ColPivHouseholderQR<Matrix> check(proj.design);
  check.setThreshold(1e-10);
  if (check.rank() < c) {
    throw DataError("projection design is numerically rank deficient (rank " + std::to_string(check.rank()) +
                    " of " + std::to_string(c) + " columns); use principal components or prune collinear columns");
  }
  Eigen::HouseholderQR<Matrix> qr(proj.design);
  proj.basis = qr.householderQ() * Matrix::Identity(T, c);
  proj.r_factor = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
  return proj;
}

Vector Projection::design_row(const Vector& x_new) const {
  if (pcs) return pcs->loadings.transpose() * x_new;
  return x_new;
}

double Projection::residual_quadratic(const Vector& y) const {
  const double q = y.squaredNorm() - (basis.transpose() * y).squaredNorm();
  return std::max(q, 0.0);
}

Vector augmented_complement_row(const Projection& proj, const Vector& x_new) {
  const Eigen::Index T = proj.rows();
  const Vector d = proj.design_row(x_new);
  // Gram matrix of the augmented design: D'D + d d' with D'D = R'R.
  Matrix gram = proj.r_factor.transpose() * proj.r_factor;
  gram.noalias() += d * d.transpose();
  const Vector v = gram.llt().solve(d);
  Vector row(T + 1);
  row.head(T) = -(proj.design * v);
  row(T) = 1.0 - d.dot(v);
  return row;
}

}  // namespace bnpfc::gp
