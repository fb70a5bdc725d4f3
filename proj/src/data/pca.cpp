#include "bnpfc/data/pca.hpp"

#include <string>

#include "bnpfc/core/errors.hpp"

namespace bnpfc::data {

PrincipalComponents principal_components(const Matrix& X, Eigen::Index r) {
  const Eigen::Index T = X.rows();
  const Eigen::Index K = X.cols();
  if (r < 1 || r > std::min(T, K)) {
    throw DataError("principal_components: r = " + std::to_string(r) + " exceeds min(T, K) = " +
                    std::to_string(std::min(T, K)));
  }
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  PrincipalComponents pc;
  pc.loadings = svd.matrixV().leftCols(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    Eigen::Index arg = 0;
    pc.loadings.col(k).cwiseAbs().maxCoeff(&arg);
    if (pc.loadings(arg, k) < 0.0) pc.loadings.col(k) *= -1.0;
  }
  pc.scores = X * pc.loadings;
  const double denom = T > 1 ? static_cast<double>(T - 1) : 1.0;
  pc.eigenvalues = s.head(r).array().square() / denom;
  const double total = s.squaredNorm();
  pc.explained_share = total > 0.0 ? Vector(s.head(r).array().square() / total) : Vector::Zero(r);
  return pc;
}

}  // namespace bnpfc::data
