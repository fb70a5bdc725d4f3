#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bnpfc/core/linalg.hpp"
#include "bnpfc/core/quarter.hpp"

namespace bnpfc::summary {

struct LassoOptions {
  double tolerance = 1e-8;  // max absolute coefficient change per sweep
  int max_sweeps = 100000;
};

/// Minimizes sum_t (q_t - beta'x_t)^2 + lambda * sum_j |beta_j| by cyclic
/// coordinate descent. No intercept: q and the columns of X are expected to be
/// centered. `start` gives a warm start. After convergence the active set is
/// re-solved exactly when that keeps every sign and KKT condition. Throws
/// NumericalError on non-convergence.
Vector lasso_fit(const Vector& q, const Matrix& X, double lambda, const LassoOptions& options = {},
                 const Vector* start = nullptr);

/// Smallest penalty with an all-zero solution: 2 max_j |X_j'q|.
double lambda_max(const Vector& q, const Matrix& X);

/// Descending log-spaced grid from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(const Vector& q, const Matrix& X, int n = 50, double ratio = 1e-4);

struct CvResult {
  std::vector<double> lambdas;
  std::vector<double> error;  // mean held-out squared error per lambda
  std::size_t best = 0;
  int folds_used = 0;
  double lambda() const { return lambdas[best]; }
};

/// Contiguous-block K-fold cross-validation. Each training block is re-centered
/// (intercept unpenalized). Folds whose training target is constant are
/// skipped with a warning; throws DataError if none remain.
CvResult cross_validate(const Vector& q, const Matrix& X, const std::vector<double>& lambdas, int folds = 5,
                        const LassoOptions& options = {});

/// 1 - SSR/SST with SST about the mean of q; nullopt when q is constant.
std::optional<double> quantile_r2(const Vector& q, const Matrix& X, const Vector& beta);

/// Column-wise z-scores (sample standard deviation). Constant columns map to
/// zero so their coefficients stay at zero.
struct Standardized {
  Matrix Z;
  Vector center;
  Vector scale;
};
Standardized standardize_columns(const Matrix& X);

struct LassoFit {
  double p = 0.0;
  Vector beta;  // standardized units
  double intercept = 0.0;
  double lambda = 0.0;
  std::optional<double> r2;
  std::vector<int> support;
  CvResult cv;
};

/// Standardizes X over the supplied rows, centers q, picks lambda by CV and
/// refits on all rows.
LassoFit fit_quantile_path(const Vector& q, const Matrix& X, double p, int folds = 5, int grid_size = 50,
                           double grid_ratio = 1e-4);

/// Predictive quantiles per origin; rows must be nondecreasing in p.
struct QuantilePathSet {
  std::vector<Quarter> dates;
  Matrix Q;  // origins x p_grid
  std::vector<double> p_grid;
  void check() const;
};

std::vector<LassoFit> summarize_paths(const QuantilePathSet& paths, const Matrix& X, int folds = 5);

struct HeatmapCell {
  std::string variable;
  double p = 0.0;
  double coefficient = 0.0;
};

/// Signed coefficients with |beta| above `floor`, ordered by p then variable.
std::vector<HeatmapCell> heatmap_data(const std::vector<LassoFit>& fits, const std::vector<std::string>& names,
                                      double floor = 1e-3);

void write_lasso_csv(const std::vector<HeatmapCell>& cells, const std::filesystem::path& path);
void write_r2_csv(const std::vector<LassoFit>& fits, const std::filesystem::path& path);

}  // namespace bnpfc::summary
