#pragma once

#include "bnpfc/core/linalg.hpp"
#include "bnpfc/core/random.hpp"

namespace bnpfc::ssm {

/// x_t = c + a x_{t-1} + w_t, w_t ~ N(0, q);  z_t = x_t + v_t, v_t ~ N(0, r_t);
/// x_1 ~ N(m0, p0). An infinite r_t marks an uninformative observation.
struct ScalarStateSpace {
  Vector z;
  Vector r;
  double c = 0.0;
  double a = 1.0;
  double q = 1.0;
  double m0 = 0.0;
  double p0 = 1.0;
};

/// Forward filter, backward sampler driven by explicit standard-normal shocks
/// (one per time point), so the draw is an affine map of the shocks: zero
/// shocks give the smoothed means.
Vector ffbs(const ScalarStateSpace& model, const Vector& shocks);

Vector ffbs_draw(const ScalarStateSpace& model, RandomStream& rng);

}  // namespace bnpfc::ssm
