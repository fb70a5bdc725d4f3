#include "bnpfc/errmodel/sv.hpp"

#include <cmath>
#include <numbers>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/gp/sampling.hpp"
#include "bnpfc/ssm/ffbs.hpp"

namespace bnpfc::errmodel {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double log_normal(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

// Centered step: independence proposal from the regression of h_t on
// (1, h_{t-1}) under a flat prior, corrected by the remaining target factors.
void draw_centered(SvState& s, const SvPrior& prior, RandomStream& rng) {
  const Eigen::Index T = s.h.size();
  const Eigen::Index n = T - 1;
  double sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (Eigen::Index t = 1; t < T; ++t) {
    const double x = s.h(t - 1), y = s.h(t);
    sx += x, sxx += x * x, sy += y, sxy += x * y;
  }
  Eigen::Matrix2d xtx;
  xtx << static_cast<double>(n), sx, sx, sxx;
  const Eigen::Vector2d xty(sy, sxy);
  const Eigen::LLT<Eigen::Matrix2d> llt(xtx);
  if (llt.info() != Eigen::Success) return;
  const Eigen::Vector2d b = llt.solve(xty);
  double ssr = 0.0;
  for (Eigen::Index t = 1; t < T; ++t) {
    const double e = s.h(t) - b(0) - b(1) * s.h(t - 1);
    ssr += e * e;
  }
  const double shape = 0.5 * static_cast<double>(n - 2);
  if (!(shape > 0.0) || !(ssr > 0.0)) return;

  const double sigma2_p = rng.inverse_gamma(shape, 0.5 * ssr);
  const Eigen::Vector2d z(rng.normal(), rng.normal());
  const Eigen::Vector2d coef = b + std::sqrt(sigma2_p) * llt.matrixU().solve(z);
  const double c_p = coef(0), rho_p = coef(1);
  if (!(std::abs(rho_p) < 1.0)) return;

  auto log_weight = [&](double c, double rho, double sigma2) {
    const double mu = c / (1.0 - rho);
    return log_normal(s.h(0), mu, sigma2 / (1.0 - rho * rho)) + sv_log_prior(mu, rho, sigma2, prior) -
           std::log(1.0 - rho) + std::log(sigma2);
  };
  const double c_cur = s.mu * (1.0 - s.rho);
  const double log_ratio = log_weight(c_p, rho_p, sigma2_p) - log_weight(c_cur, s.rho, s.sigma2);
  if (gp::metropolis_accept(log_ratio, rng)) {
    s.mu = c_p / (1.0 - rho_p);
    s.rho = rho_p;
    s.sigma2 = sigma2_p;
  }
}

// Non-centered step: with htilde = (h - mu) / sigma fixed, the observation
// equation z_t = mu + sigma htilde_t + noise is a Gaussian regression in (mu, sigma).
void draw_noncentered(SvState& s, const Vector& z, const Vector& r, const SvPrior& prior, RandomStream& rng) {
  const double sigma = std::sqrt(s.sigma2);
  const Vector ht = (s.h.array() - s.mu) / sigma;
  Eigen::Matrix2d prec = Eigen::Matrix2d::Zero();
  prec(0, 0) = 1.0 / prior.mu_var;
  prec(1, 1) = 1.0 / prior.sigma_scale;
  Eigen::Vector2d lin(prior.mu_mean / prior.mu_var, 0.0);
  for (Eigen::Index t = 0; t < z.size(); ++t) {
    const double w = 1.0 / r(t);
    prec(0, 0) += w;
    prec(0, 1) += w * ht(t);
    prec(1, 1) += w * ht(t) * ht(t);
    lin(0) += w * z(t);
    lin(1) += w * ht(t) * z(t);
  }
  prec(1, 0) = prec(0, 1);
  const Eigen::LLT<Eigen::Matrix2d> llt(prec);
  if (llt.info() != Eigen::Success) return;
  const Eigen::Vector2d mean = llt.solve(lin);
  const Eigen::Vector2d e(rng.normal(), rng.normal());
  const Eigen::Vector2d draw = mean + llt.matrixU().solve(e);
  const double mu_new = draw(0);
  // (sigma, htilde) and (-sigma, -htilde) give the same h.
  const double sigma_new = std::abs(draw(1));
  const double sign = draw(1) < 0.0 ? -1.0 : 1.0;
  if (!(sigma_new > 0.0)) return;
  s.mu = mu_new;
  s.sigma2 = sigma_new * sigma_new;
  s.h = (mu_new + sign * sigma_new * ht.array()).matrix();
}

}  // namespace

double LogChi2Mixture::log_density(double x) {
  double total = 0.0;
  for (std::size_t k = 0; k < 10; ++k) total += prob[k] * std::exp(log_normal(x, mean[k], var[k]));
  return std::log(total);
}

SvState init_sv(Eigen::Index T, double log_var0) {
  SvState s;
  s.h = Vector::Constant(T, log_var0);
  s.mu = log_var0;
  s.rho = 0.9;
  s.sigma2 = 0.1;
  return s;
}

double sv_log_prior(double mu, double rho, double sigma2, const SvPrior& prior) {
  if (!(std::abs(rho) < 1.0) || !(sigma2 > 0.0)) return -std::numeric_limits<double>::infinity();
  const double x = 0.5 * (rho + 1.0);
  return log_normal(mu, prior.mu_mean, prior.mu_var) + (prior.rho_a - 1.0) * std::log(x) +
         (prior.rho_b - 1.0) * std::log1p(-x) - 0.5 * std::log(sigma2) - sigma2 / (2.0 * prior.sigma_scale);
}

std::pair<Vector, Vector> sv_draw_path(const Vector& resid, SvState& s, const SvPrior& prior, RandomStream& rng) {
  const Eigen::Index T = resid.size();
  const Vector ystar = (resid.array().square() + prior.offset).log();

  Vector z(T), r(T);
  std::array<double, 10> lp{};
  for (Eigen::Index t = 0; t < T; ++t) {
    const double d = ystar(t) - s.h(t);
    for (std::size_t k = 0; k < 10; ++k) {
      lp[k] = std::log(LogChi2Mixture::prob[k]) + log_normal(d, LogChi2Mixture::mean[k], LogChi2Mixture::var[k]);
    }
    const std::size_t k = rng.categorical_from_log(lp.data(), 10);
    z(t) = ystar(t) - LogChi2Mixture::mean[k];
    r(t) = LogChi2Mixture::var[k];
  }

  ssm::ScalarStateSpace m;
  m.z = z;
  m.r = r;
  m.c = s.mu * (1.0 - s.rho);
  m.a = s.rho;
  m.q = s.sigma2;
  m.m0 = s.mu;
  m.p0 = s.sigma2 / (1.0 - s.rho * s.rho);
  s.h = ssm::ffbs_draw(m, rng);
  return {std::move(z), std::move(r)};
}

void sv_update(const Vector& resid, SvState& s, const SvPrior& prior, RandomStream& rng) {
  const auto [z, r] = sv_draw_path(resid, s, prior, rng);
  draw_centered(s, prior, rng);
  draw_noncentered(s, z, r, prior, rng);
  if (!s.h.allFinite() || !std::isfinite(s.mu) || !(s.sigma2 > 0.0)) {
    throw NumericalError("stochastic volatility update produced a non-finite state");
  }
}

double sv_forecast_logvar(const SvState& s, int steps, RandomStream& rng) {
  double h = s.h(s.h.size() - 1);
  const double sd = std::sqrt(s.sigma2);
  for (int k = 0; k < steps; ++k) h = s.mu + s.rho * (h - s.mu) + sd * rng.normal();
  return h;
}

}  // namespace bnpfc::errmodel
