#pragma once

// Dense reference computations used as test oracles. They evaluate textbook
// formulas literally (explicit inverses, full joint covariances) and are kept
// independent of the library's factorized code paths.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix inverse(const Matrix& a) { return a.fullPivLu().inverse(); }

inline Matrix kernel(const Matrix& X, double xi, double phi, double nugget) {
  const Eigen::Index T = X.rows();
  Matrix k(T, T);
  for (Eigen::Index i = 0; i < T; ++i)
    for (Eigen::Index j = 0; j < T; ++j)
      k(i, j) = xi * std::exp(-phi / 2.0 * (X.row(i) - X.row(j)).squaredNorm()) + (i == j ? nugget * xi : 0.0);
  return k;
}

inline Matrix hat(const Matrix& B) { return B * inverse(B.transpose() * B) * B.transpose(); }

/// Conditional of the last coordinate of N(0, S) given the others = f.
inline std::pair<double, double> condition_last(const Matrix& S, const Vector& f) {
  const Eigen::Index T = f.size();
  const Matrix s11 = S.topLeftCorner(T, T);
  const Vector s12 = S.col(T).head(T);
  const Vector w = inverse(s11) * s12;
  return {w.dot(f), S(T, T) - s12.dot(w)};
}

/// Kolmogorov-Smirnov distance between a sample and a CDF.
template <class Cdf>
double ks_distance(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    d = std::max({d, std::abs(F - i / n), std::abs((i + 1) / n - F)});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov distance.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

/// Exact LASSO minimizer of sum (q - X b)^2 + lambda |b|_1 by enumerating every
/// support and sign pattern and keeping the best sign-consistent stationary
/// point. Feasible only for a handful of columns.
inline Vector lasso_enumerate(const Vector& q, const Matrix& X, double lambda) {
  const int K = static_cast<int>(X.cols());
  Vector best = Vector::Zero(K);
  double best_obj = q.squaredNorm();
  int patterns = 1;
  for (int j = 0; j < K; ++j) patterns *= 3;
  for (int code = 1; code < patterns; ++code) {
    std::vector<int> idx;
    std::vector<double> sgn;
    for (int j = 0, c = code; j < K; ++j, c /= 3) {
      if (c % 3 == 0) continue;
      idx.push_back(j);
      sgn.push_back(c % 3 == 1 ? 1.0 : -1.0);
    }
    const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
    Matrix xs(X.rows(), m);
    Vector s(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      xs.col(k) = X.col(idx[static_cast<std::size_t>(k)]);
      s(k) = sgn[static_cast<std::size_t>(k)];
    }
    const Vector b = inverse(xs.transpose() * xs) * (xs.transpose() * q - 0.5 * lambda * s);
    bool consistent = true;
    for (Eigen::Index k = 0; k < m; ++k) consistent = consistent && b(k) * s(k) > 0.0;
    if (!consistent) continue;
    Vector full = Vector::Zero(K);
    for (Eigen::Index k = 0; k < m; ++k) full(idx[static_cast<std::size_t>(k)]) = b(k);
    const double obj = (q - X * full).squaredNorm() + lambda * full.cwiseAbs().sum();
    if (obj < best_obj) {
      best_obj = obj;
      best = full;
    }
  }
  return best;
}

}  // namespace oracle
