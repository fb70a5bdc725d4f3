#pragma once

#include <limits>

#include "bnpfc/core/linalg.hpp"
#include "bnpfc/gp/kernel.hpp"
#include "bnpfc/gp/projection.hpp"

namespace bnpfc::gp {

struct GpPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

inline constexpr double kPlainGp = std::numeric_limits<double>::infinity();

/// Conditional of f(x_new) given the training values f under the subspace
/// prior built on the kernel and projection augmented with x_new. tau2 =
/// kPlainGp gives ordinary GP conditioning. The training kernel factor is built
/// once per hyperparameter value and reused across new points.
class GpPredictor {
 public:
  GpPredictor(const Matrix& X, const Matrix& sqdist, const Projection& proj, const KernelHyper& hyper);

  GpPrediction predict(const Vector& f, double tau2, const Vector& x_new) const;

 private:
  const Matrix& X_;
  const Projection& proj_;
  KernelHyper hyper_;
  SpdFactor k_factor_;
};

/// f(x_new) in the linear limit: d_new' R^{-1} g where f = Q g on the training rows.
double linear_predict(const Projection& proj, const Vector& coef, const Vector& x_new);

}  // namespace bnpfc::gp
