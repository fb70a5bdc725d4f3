#pragma once

#include <Eigen/Dense>

namespace bnpfc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SpdFactor {
  Eigen::LLT<Matrix> llt;
  double jitter = 0.0;  // absolute amount added to the diagonal

  double log_det() const;
};

/// Cholesky of a + jitter * I. The first attempt uses `first_jitter` (absolute,
/// may be 0); on failure the jitter escalates x10, starting from
/// max(first_jitter, 1e-8 * scale), up to 1e-4 * scale. Throws NumericalError.
SpdFactor factorize_spd(const Matrix& a, double scale, double first_jitter);

/// log N(x; 0, A) given a factor of A.
double log_normal_density(const Vector& x, const SpdFactor& factor);

/// Draws N(0, A) given a factor of A.
template <class Stream>
Vector draw_from_factor(const SpdFactor& factor, Stream& rng) {
  Vector z(factor.llt.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return factor.llt.matrixL() * z;
}

inline double sum_log_diag(const Matrix& lower) {
  return lower.diagonal().array().log().sum();
}

}  // namespace bnpfc
