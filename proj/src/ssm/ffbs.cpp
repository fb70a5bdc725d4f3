#include "bnpfc/ssm/ffbs.hpp"

#include <cmath>

namespace bnpfc::ssm {

Vector ffbs(const ScalarStateSpace& m, const Vector& shocks) {
  const Eigen::Index T = m.z.size();
  Vector filt_mean(T), filt_var(T);
  double pred_mean = m.m0;
  double pred_var = m.p0;
  for (Eigen::Index t = 0; t < T; ++t) {
    if (t > 0) {
      pred_mean = m.c + m.a * filt_mean(t - 1);
      pred_var = m.a * m.a * filt_var(t - 1) + m.q;
    }
    if (std::isinf(m.r(t))) {
      filt_mean(t) = pred_mean;
      filt_var(t) = pred_var;
      continue;
    }
    const double s = pred_var + m.r(t);
    const double gain = pred_var / s;
    filt_mean(t) = pred_mean + gain * (m.z(t) - pred_mean);
    filt_var(t) = pred_var * m.r(t) / s;
  }

  Vector x(T);
  x(T - 1) = filt_mean(T - 1) + std::sqrt(filt_var(T - 1)) * shocks(T - 1);
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    // x_t | x_{t+1}, z_{1:t}
    const double p = filt_var(t);
    const double denom = m.a * m.a * p + m.q;
    const double gain = denom > 0.0 ? m.a * p / denom : 0.0;
    const double mean = filt_mean(t) + gain * (x(t + 1) - m.c - m.a * filt_mean(t));
    const double var = std::max(p - gain * m.a * p, 0.0);
    x(t) = mean + std::sqrt(var) * shocks(t);
  }
  return x;
}

Vector ffbs_draw(const ScalarStateSpace& model, RandomStream& rng) {
  Vector shocks(model.z.size());
  for (Eigen::Index t = 0; t < shocks.size(); ++t) shocks(t) = rng.normal();
  return ffbs(model, shocks);
}

}  // namespace bnpfc::ssm
