#include "bnpfc/core/linalg.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bnpfc/core/errors.hpp"

namespace bnpfc {

double SpdFactor::log_det() const {
  return 2.0 * sum_log_diag(llt.matrixLLT());
}

SpdFactor factorize_spd(const Matrix& a, double scale, double first_jitter) {
  SpdFactor out;
  const double floor = 1e-8 * scale;
  const double ceiling = 1e-4 * scale;
  double jitter = first_jitter;
  for (;;) {
    if (jitter > 0.0) {
      Matrix b = a;
      b.diagonal().array() += jitter;
      out.llt.compute(b);
    } else {
      out.llt.compute(a);
    }
    if (out.llt.info() == Eigen::Success &&
        out.llt.matrixLLT().diagonal().array().isFinite().all()) {
      out.jitter = jitter;
      return out;
    }
    const double next = jitter <= 0.0 ? floor : std::max(jitter * 10.0, floor);
    if (next > ceiling * (1.0 + 1e-12) || !(scale > 0.0)) {
      std::ostringstream msg;
      msg << "matrix of size " << a.rows() << " not positive definite after jitter "
          << jitter << " (scale " << scale << ")";
      throw NumericalError(msg.str());
    }
    jitter = next;
  }
}

double log_normal_density(const Vector& x, const SpdFactor& factor) {
  const Vector z = factor.llt.matrixL().solve(x);
  return -0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) -
         0.5 * factor.log_det() - 0.5 * z.squaredNorm();
}

}  // namespace bnpfc
