#include "bnpfc/summary/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/core/log.hpp"
#include "data/csv.hpp"

namespace bnpfc::summary {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Solves the stationarity equations on the converged active set with its
// signs held fixed. Returns false when the result breaks sign consistency or
// the inactive-set conditions, in which case the caller keeps `beta`.
bool polish_active_set(const Vector& q, const Matrix& X, double lambda, Vector& beta) {
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (beta(j) != 0.0) active.push_back(j);
  if (active.empty()) return false;
  const Eigen::Index m = static_cast<Eigen::Index>(active.size());
  Matrix xa(X.rows(), m);
  Vector s(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    xa.col(k) = X.col(active[static_cast<std::size_t>(k)]);
    s(k) = beta(active[static_cast<std::size_t>(k)]) > 0.0 ? 1.0 : -1.0;
  }
  const Eigen::LDLT<Matrix> gram(xa.transpose() * xa);
  if (gram.info() != Eigen::Success || gram.rcond() < 1e-12) return false;
  const Vector b = gram.solve(xa.transpose() * q - 0.5 * lambda * s);
  for (Eigen::Index k = 0; k < m; ++k)
    if (b(k) * s(k) <= 0.0) return false;
  Vector next = Vector::Zero(beta.size());
  for (Eigen::Index k = 0; k < m; ++k) next(active[static_cast<std::size_t>(k)]) = b(k);
  const Vector grad = 2.0 * X.transpose() * (q - X * next);
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (next(j) == 0.0 && std::abs(grad(j)) > lambda) return false;
  beta = next;
  return true;
}

bool constant(const Vector& v) { return (v.array() - v.mean()).abs().maxCoeff() < 1e-12 * (1.0 + v.cwiseAbs().maxCoeff()); }

}  // namespace

Vector lasso_fit(const Vector& q, const Matrix& X, double lambda, const LassoOptions& options, const Vector* start) {
  if (X.rows() != q.size()) throw DataError("lasso: design rows do not match the target length");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lasso: lambda must be nonnegative");
  const Eigen::Index K = X.cols();
  Vector beta = start ? *start : Vector::Zero(K);
  if (beta.size() != K) throw std::invalid_argument("lasso: warm start has the wrong length");
  const Vector norms = X.colwise().squaredNorm().transpose();
  Vector r = q - X * beta;
  double change = 0.0;
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    change = 0.0;
    for (Eigen::Index j = 0; j < K; ++j) {
      if (norms(j) == 0.0) {
        beta(j) = 0.0;
        continue;
      }
      const double old = beta(j);
      const double z = X.col(j).dot(r) + norms(j) * old;
      const double next = soft_threshold(z, 0.5 * lambda) / norms(j);
      if (next != old) {
        r.noalias() -= (next - old) * X.col(j);
        beta(j) = next;
        change = std::max(change, std::abs(next - old));
      }
    }
    if (change < options.tolerance) {
      polish_active_set(q, X, lambda, beta);
      return beta;
    }
  }
  std::ostringstream msg;
  msg << "lasso did not converge in " << options.max_sweeps << " sweeps at lambda " << lambda
      << ": last coefficient change " << change << ", residual sum of squares " << r.squaredNorm();
  throw NumericalError(msg.str());
}

double lambda_max(const Vector& q, const Matrix& X) { return 2.0 * (X.transpose() * q).cwiseAbs().maxCoeff(); }

std::vector<double> lambda_grid(const Vector& q, const Matrix& X, int n, double ratio) {
  if (n < 2 || !(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("lambda_grid: need n >= 2 and 0 < ratio < 1");
  const double top = lambda_max(q, X);
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = top * std::pow(ratio, static_cast<double>(i) / (n - 1));
  return grid;
}

CvResult cross_validate(const Vector& q, const Matrix& X, const std::vector<double>& lambdas, int folds,
                        const LassoOptions& options) {
  if (folds < 2) throw std::invalid_argument("cross_validate: folds must be at least 2");
  if (lambdas.empty()) throw std::invalid_argument("cross_validate: empty lambda grid");
  const Eigen::Index n = q.size();
  if (n < folds) throw DataError("cross_validate: fewer rows than folds");
  CvResult out;
  out.lambdas = lambdas;
  out.error.assign(lambdas.size(), 0.0);
  Eigen::Index held_total = 0;

  for (int f = 0; f < folds; ++f) {
    const Eigen::Index lo = n * f / folds;
    const Eigen::Index hi = n * (f + 1) / folds;
    const Eigen::Index m = n - (hi - lo);
    Vector qt(m);
    Matrix xt(m, X.cols());
    qt << q.head(lo), q.tail(n - hi);
    xt << X.topRows(lo), X.bottomRows(n - hi);
    if (constant(qt)) {
      log_warning("cross_validate: fold " + std::to_string(f + 1) + " has a constant training target; skipped");
      continue;
    }
    const double q_mean = qt.mean();
    const Eigen::RowVectorXd x_mean = xt.colwise().mean();
    qt.array() -= q_mean;
    xt.rowwise() -= x_mean;
    const Matrix xh = X.middleRows(lo, hi - lo).rowwise() - x_mean;
    const Vector qh = q.segment(lo, hi - lo).array() - q_mean;

    Vector beta = Vector::Zero(X.cols());
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      beta = lasso_fit(qt, xt, lambdas[k], options, &beta);
      out.error[k] += (qh - xh * beta).squaredNorm();
    }
    held_total += hi - lo;
    ++out.folds_used;
  }
  if (out.folds_used == 0) throw DataError("cross_validate: every fold was degenerate");
  for (double& e : out.error) e /= static_cast<double>(held_total);
  out.best = static_cast<std::size_t>(std::min_element(out.error.begin(), out.error.end()) - out.error.begin());
  return out;
}

std::optional<double> quantile_r2(const Vector& q, const Matrix& X, const Vector& beta) {
  const double sst = (q.array() - q.mean()).square().sum();
  if (constant(q) || sst == 0.0) return std::nullopt;
  const Vector fit = X * beta;
  const double shift = q.mean() - fit.mean();
  const double ssr = (q.array() - fit.array() - shift).square().sum();
  return 1.0 - ssr / sst;
}

Standardized standardize_columns(const Matrix& X) {
  if (X.rows() < 2) throw DataError("standardize_columns: need at least two rows");
  Standardized s;
  s.center = X.colwise().mean().transpose();
  s.Z = X.rowwise() - s.center.transpose();
  s.scale = (s.Z.colwise().squaredNorm() / static_cast<double>(X.rows() - 1)).cwiseSqrt().transpose();
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (s.scale(j) > 0.0) {
      s.Z.col(j) /= s.scale(j);
    } else {
      s.Z.col(j).setZero();
    }
  }
  return s;
}

LassoFit fit_quantile_path(const Vector& q, const Matrix& X, double p, int folds, int grid_size, double grid_ratio) {
  if (X.rows() != q.size()) throw DataError("quantile path and predictors differ in length");
  LassoFit fit;
  fit.p = p;
  const Standardized s = standardize_columns(X);
  const double q_mean = q.mean();
  const Vector qc = q.array() - q_mean;
  if (constant(q)) {
    log_warning("quantile path at p = " + detail::format_number(p, 6) + " is constant; coefficients set to zero");
    fit.beta = Vector::Zero(X.cols());
    fit.intercept = q_mean;
    return fit;
  }
  fit.cv = cross_validate(qc, s.Z, lambda_grid(qc, s.Z, grid_size, grid_ratio), folds);
  fit.lambda = fit.cv.lambda();
  fit.beta = lasso_fit(qc, s.Z, fit.lambda);
  fit.intercept = q_mean;
  fit.r2 = quantile_r2(q, s.Z, fit.beta);
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j)
    if (fit.beta(j) != 0.0) fit.support.push_back(static_cast<int>(j));
  return fit;
}

void QuantilePathSet::check() const {
  if (Q.rows() != static_cast<Eigen::Index>(dates.size()) || Q.cols() != static_cast<Eigen::Index>(p_grid.size()))
    throw DataError("quantile path set has inconsistent dimensions");
  for (Eigen::Index i = 0; i < Q.rows(); ++i)
    for (Eigen::Index k = 1; k < Q.cols(); ++k)
      if (Q(i, k) < Q(i, k - 1))
        throw DataError("predictive quantiles at " + dates[static_cast<std::size_t>(i)].to_string() +
                        " are not monotone in p");
}

std::vector<LassoFit> summarize_paths(const QuantilePathSet& paths, const Matrix& X, int folds) {
  paths.check();
  if (X.rows() != paths.Q.rows()) throw DataError("predictor rows do not match the quantile paths");
  std::vector<LassoFit> fits;
  for (std::size_t k = 0; k < paths.p_grid.size(); ++k) {
    fits.push_back(fit_quantile_path(paths.Q.col(static_cast<Eigen::Index>(k)), X, paths.p_grid[k], folds));
  }
  return fits;
}

std::vector<HeatmapCell> heatmap_data(const std::vector<LassoFit>& fits, const std::vector<std::string>& names,
                                      double floor) {
  std::vector<HeatmapCell> cells;
  for (const auto& f : fits) {
    if (f.beta.size() != static_cast<Eigen::Index>(names.size()))
      throw DataError("heatmap: coefficient count does not match the variable names");
    for (Eigen::Index j = 0; j < f.beta.size(); ++j) {
      if (std::abs(f.beta(j)) > floor) cells.push_back({names[static_cast<std::size_t>(j)], f.p, f.beta(j)});
    }
  }
  return cells;
}

void write_lasso_csv(const std::vector<HeatmapCell>& cells, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "variable,p,coefficient\n";
  for (const auto& c : cells)
    out << c.variable << ',' << detail::format_number(c.p, 6) << ',' << detail::format_number(c.coefficient, 12) << '\n';
}

void write_r2_csv(const std::vector<LassoFit>& fits, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "p,r2,lambda,nonzero\n";
  for (const auto& f : fits) {
    out << detail::format_number(f.p, 6) << ',' << (f.r2 ? detail::format_number(*f.r2, 12) : "NA") << ','
        << detail::format_number(f.lambda, 12) << ',' << f.support.size() << '\n';
  }
}

}  // namespace bnpfc::summary
