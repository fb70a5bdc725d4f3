#include "bnpfc/gp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bnpfc/core/log.hpp"

namespace bnpfc::gp {
namespace {

double logit(double x) { return std::log(x) - std::log1p(-x); }

double inv_logit(double z) {
  const double x = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  return std::clamp(x, 1e-12, 1.0 - 1e-12);
}

double log_diag_normal(const Vector& r, const Vector& var) {
  return -0.5 * (static_cast<double>(r.size()) * std::log(2.0 * std::numbers::pi) +
                 var.array().log().sum() + (r.array().square() / var.array()).sum());
}

}  // namespace

GpConditional::GpConditional(Matrix k1, Vector sigma_diag, Vector resid)
    : k1_(std::move(k1)), sigma_(std::move(sigma_diag)), resid_(std::move(resid)) {
  const double scale = k1_.diagonal().cwiseAbs().maxCoeff();
  if (!(scale > 0.0) && k1_.cwiseAbs().maxCoeff() == 0.0) {
    degenerate_ = true;
    mean_ = Vector::Zero(resid_.size());
    alpha_ = resid_.cwiseQuotient(sigma_);
    log_lik_ = log_diag_normal(resid_, sigma_);
    return;
  }
  Matrix c = k1_;
  c.diagonal() += sigma_;
  c_factor_ = factorize_spd(c, c.diagonal().maxCoeff(), 0.0);
  alpha_ = c_factor_.llt.solve(resid_);
  mean_.noalias() = k1_ * alpha_;
  log_lik_ = log_normal_density(resid_, c_factor_);
}

Matrix GpConditional::covariance() const {
  if (degenerate_) return Matrix::Zero(k1_.rows(), k1_.cols());
  const Matrix w = c_factor_.llt.matrixL().solve(k1_);
  Matrix v = k1_;
  v.noalias() -= w.transpose() * w;
  return 0.5 * (v + v.transpose());
}

Vector GpConditional::draw(RandomStream& rng) const {
  const Eigen::Index T = resid_.size();
  if (degenerate_) return Vector::Zero(T);
  const SpdFactor prior = factorize_spd(k1_, k1_.diagonal().maxCoeff(), 0.0);
  const Vector f0 = draw_from_factor(prior, rng);
  Vector gap = resid_ - f0;
  for (Eigen::Index t = 0; t < T; ++t) gap(t) -= std::sqrt(sigma_(t)) * rng.normal();
  return f0 + k1_ * c_factor_.llt.solve(gap);
}

LinearConditional::LinearConditional(const Matrix& basis, const Matrix& prior_precision,
                                     const Vector& sigma_diag, const Vector& resid) {
  const Vector inv_sigma = sigma_diag.cwiseInverse();
  const Matrix weighted = basis.transpose() * inv_sigma.asDiagonal();
  Matrix h = prior_precision;
  h.noalias() += weighted * basis;
  post_prec_.compute(h);
  if (post_prec_.info() != Eigen::Success) throw NumericalError("linear posterior precision not positive definite");
  const Vector b = weighted * resid;
  coef_mean_ = post_prec_.solve(b);

  Eigen::LLT<Matrix> prior_llt(prior_precision);
  if (prior_llt.info() != Eigen::Success) throw NumericalError("linear prior precision not positive definite");
  const double log_det_c = sigma_diag.array().log().sum() - 2.0 * sum_log_diag(prior_llt.matrixLLT()) +
                           2.0 * sum_log_diag(post_prec_.matrixLLT());
  const double quad = resid.dot(resid.cwiseProduct(inv_sigma)) - b.dot(coef_mean_);
  log_lik_ = -0.5 * (static_cast<double>(resid.size()) * std::log(2.0 * std::numbers::pi) + log_det_c + quad);
}

Matrix LinearConditional::coef_covariance() const {
  return post_prec_.solve(Matrix::Identity(coef_mean_.size(), coef_mean_.size()));
}

Vector LinearConditional::draw_coef(RandomStream& rng) const {
  Vector z(coef_mean_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return coef_mean_ + post_prec_.matrixU().solve(z);
}

double log_tau_prior(double tau, const Tau2Prior& prior) {
  const double t2 = tau * tau;
  return (prior.d1 - 0.5) * std::log(t2) - (prior.d0 + prior.d1) * std::log1p(t2);
}

double sample_tau2(const Vector& f, const Projection& proj, double tau2_current, const Tau2Prior& prior,
                   RandomStream& rng) {
  const double a = prior.d0 + prior.d1;
  const double q = proj.residual_quadratic(f);
  double rate = 0.5 * q;
  if (!(q > 1e-12 * std::max(f.squaredNorm(), 1e-300))) {
    thread_local bool warned = false;
    if (!warned && f.squaredNorm() > 0.0) {
      log_warning("sample_tau2: f lies in the projection space; drawing from the rate-0 limit");
      warned = true;
    }
    rate = 0.0;
  }
  const double shape = prior.d0 + 0.5 * static_cast<double>(f.size() - proj.rank());
  const double zeta = 1.0 / tau2_current;
  const double log_u = std::log(rng.uniform()) - a * std::log1p(zeta);
  const double upper = std::expm1(-log_u / a);
  const double zeta_new = std::max(rng.truncated_gamma(shape, rate, upper), 1e-300);
  return 1.0 / zeta_new;
}

void AdaptiveStep::record(bool accept) {
  ++proposals;
  if (accept) ++accepted;
  if (adapting) {
    const double gain = 2.0 / std::pow(static_cast<double>(proposals) + 1.0, 0.6);
    log_scale += gain * ((accept ? 1.0 : 0.0) - target);
    log_scale = std::clamp(log_scale, std::log(1e-4), std::log(20.0));
  }
}

bool metropolis_accept(double log_ratio, RandomStream& rng) {
  const double u = rng.uniform();
  return std::log(u) < log_ratio;
}

HyperProposal propose_kernel_hyper(const KernelHyper& current, double scale, RandomStream& rng) {
  HyperProposal prop;
  prop.hyper.xi = inv_logit(logit(current.xi) + scale * rng.normal());
  prop.hyper.phi = inv_logit(logit(current.phi) + scale * rng.normal());
  auto log_jac = [](double x) { return std::log(x) + std::log1p(-x); };
  prop.log_jacobian_ratio = log_jac(prop.hyper.xi) + log_jac(prop.hyper.phi) - log_jac(current.xi) -
                            log_jac(current.phi);
  return prop;
}

}  // namespace bnpfc::gp
