#pragma once

#include <optional>

#include "bnpfc/core/linalg.hpp"
#include "bnpfc/data/pca.hpp"

namespace bnpfc::gp {

struct ProjectionOptions {
  bool force_pcs = false;  // always project on principal components
  int n_pcs = 6;
};

/// Column space that the subspace prior shrinks toward. `design` is either the
/// standardized predictors or their leading principal-component scores;
/// design = basis * r_factor with orthonormal `basis`.
struct Projection {
  Matrix design;
  Matrix basis;
  Matrix r_factor;
  std::optional<data::PrincipalComponents> pcs;

  Eigen::Index rows() const { return basis.rows(); }
  Eigen::Index rank() const { return basis.cols(); }
  /// Phi0 = B (B'B)^{-1} B' as a dense matrix.
  Matrix phi0() const { return basis * basis.transpose(); }
  /// Design row for a new standardized predictor vector.
  Vector design_row(const Vector& x_new) const;
  /// y'(I - Phi0) y.
  double residual_quadratic(const Vector& y) const;
};

/// Uses X itself when K < T (and PCs are not forced), otherwise its first
/// n_pcs principal components. Throws DataError if the chosen design is
/// numerically rank deficient.
Projection projection_matrix(const Matrix& X, const ProjectionOptions& options = {});

/// Last row of the projector I - Phi0_aug for the design augmented with one
/// extra row; entries 0..T-1 are the cross terms, entry T the diagonal.
Vector augmented_complement_row(const Projection& proj, const Vector& x_new);

}  // namespace bnpfc::gp
