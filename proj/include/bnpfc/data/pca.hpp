#pragma once

#include "bnpfc/core/linalg.hpp"

namespace bnpfc::data {

struct PrincipalComponents {
  Matrix scores;           // T x r
  Matrix loadings;         // K x r, orthonormal columns
  Vector eigenvalues;      // leading r eigenvalues of X'X / (T - 1)
  Vector explained_share;  // share of total variance per component

  /// Scores of new standardized rows (n x K) on the same loadings.
  Matrix project(const Matrix& rows) const { return rows * loadings; }
};

/// Leading r principal components of a standardized matrix, ordered by
/// descending eigenvalue. Each loading vector is signed so that its largest
/// magnitude entry is positive. Throws DataError if r > min(T, K).
PrincipalComponents principal_components(const Matrix& X, Eigen::Index r);

}  // namespace bnpfc::data
