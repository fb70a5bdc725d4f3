#pragma once

#include <array>
#include <utility>

#include "bnpfc/core/linalg.hpp"
#include "bnpfc/core/random.hpp"

namespace bnpfc::errmodel {

struct SvPrior {
  double mu_mean = 0.0;
  double mu_var = 10.0;
  double rho_a = 20.0;  // (rho + 1) / 2 ~ Beta(rho_a, rho_b)
  double rho_b = 1.5;
  double sigma_scale = 1.0;  // sigma_h ~ N(0, sigma_scale), i.e. sigma_h^2 ~ Gamma(1/2, rate 1 / (2 sigma_scale))
  double offset = 1e-6;      // inside log(eps^2 + offset)
};

/// h_t = mu + rho (h_{t-1} - mu) + sigma eta_t, h_1 ~ N(mu, sigma^2 / (1 - rho^2)).
struct SvState {
  Vector h;
  double mu = 0.0;
  double rho = 0.9;
  double sigma2 = 0.1;
};

/// Ten-component normal mixture approximation of log chi^2_1.
struct LogChi2Mixture {
  static constexpr std::array<double, 10> prob{0.00609, 0.04775, 0.13057, 0.20674, 0.22715,
                                               0.18842, 0.12047, 0.05591, 0.01575, 0.00115};
  static constexpr std::array<double, 10> mean{1.92677, 1.34744, 0.73504, 0.02266, -0.85173,
                                               -1.97278, -3.46788, -5.55246, -8.68384, -14.65};
  static constexpr std::array<double, 10> var{0.11265, 0.17788, 0.26768, 0.40611, 0.62699,
                                              0.98583, 1.57469, 2.54498, 4.16591, 7.33342};
  static double log_density(double x);
};

SvState init_sv(Eigen::Index T, double log_var0);

/// Log prior of (mu, rho, sigma^2).
double sv_log_prior(double mu, double rho, double sigma2, const SvPrior& prior);

/// Mixture indicators given the current path, then a new path by FFBS with
/// the parameters held fixed. Returns the indicator-implied observations
/// (z_t, r_t) used by the draw.
std::pair<Vector, Vector> sv_draw_path(const Vector& resid, SvState& state, const SvPrior& prior, RandomStream& rng);

/// Mixture indicators, log-volatility path by FFBS, then (mu, rho, sigma^2)
/// with an ancillarity-sufficiency interweaving step.
void sv_update(const Vector& resid, SvState& state, const SvPrior& prior, RandomStream& rng);

/// Draws h_{T+steps} forward through the AR(1).
double sv_forecast_logvar(const SvState& state, int steps, RandomStream& rng);

}  // namespace bnpfc::errmodel
