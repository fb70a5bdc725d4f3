#include "bnpfc/gp/predict.hpp"

#include <cmath>

namespace bnpfc::gp {

GpPredictor::GpPredictor(const Matrix& X, const Matrix& sqdist, const Projection& proj, const KernelHyper& hyper)
    : X_(X), proj_(proj), hyper_(hyper) {
  k_factor_ = factorize_spd(kernel_from_distances(sqdist, hyper), hyper.xi, 0.0);
}

GpPrediction GpPredictor::predict(const Vector& f, double tau2, const Vector& x_new) const {
  const Eigen::Index T = f.size();
  const Vector k = kernel_cross(X_, x_new, hyper_);
  const double kss = hyper_.xi * (1.0 + kNugget) + k_factor_.jitter;
  const Vector v = k_factor_.llt.solve(k);
  const double s = std::max(kss - k.dot(v), hyper_.xi * kNugget * 1e-3);
  if (std::isinf(tau2)) return {v.dot(f), s};

  const Vector p = augmented_complement_row(proj_, x_new);
  const double lambda_nn = 1.0 / s + p(T) / tau2;
  const double cross = -v.dot(f) / s + p.head(T).dot(f) / tau2;
  return {-cross / lambda_nn, 1.0 / lambda_nn};
}

double linear_predict(const Projection& proj, const Vector& coef, const Vector& x_new) {
  const Vector beta = proj.r_factor.triangularView<Eigen::Upper>().solve(coef);
  return proj.design_row(x_new).dot(beta);
}

}  // namespace bnpfc::gp
