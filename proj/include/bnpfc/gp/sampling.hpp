#pragma once

#include <cmath>
#include <optional>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/core/linalg.hpp"
#include "bnpfc/core/random.hpp"
#include "bnpfc/gp/kernel.hpp"
#include "bnpfc/gp/projection.hpp"

namespace bnpfc::gp {

/// Conditional of f given y - mu = r under f ~ N(0, K1), r | f ~ N(f, Sigma)
/// with Sigma diagonal. Caches the factor of K1 + Sigma so the collapsed
/// likelihood, the posterior moments and a draw share one factorization.
class GpConditional {
 public:
  GpConditional(Matrix k1, Vector sigma_diag, Vector resid);

  /// log N(r; 0, K1 + Sigma).
  double log_lik() const { return log_lik_; }
  /// K1 (K1 + Sigma)^{-1} r.
  const Vector& mean() const { return mean_; }
  /// K1 - K1 (K1 + Sigma)^{-1} K1.
  Matrix covariance() const;
  /// Exact draw from N(mean, covariance) by conditioning a joint prior draw.
  Vector draw(RandomStream& rng) const;

  const Matrix& k1() const { return k1_; }

 private:
  Matrix k1_;
  Vector sigma_;
  Vector resid_;
  SpdFactor c_factor_;
  Vector alpha_;
  Vector mean_;
  double log_lik_ = 0.0;
  bool degenerate_ = false;
};

/// Same conditional for the rank-r prior f = Q g, g ~ N(0, M), given M^{-1}: everything is
/// done in basis coordinates through the Woodbury identity.
class LinearConditional {
 public:
  LinearConditional(const Matrix& basis, const Matrix& prior_precision, const Vector& sigma_diag,
                    const Vector& resid);

  double log_lik() const { return log_lik_; }
  const Vector& coef_mean() const { return coef_mean_; }
  Matrix coef_covariance() const;
  Vector draw_coef(RandomStream& rng) const;

 private:
  Eigen::LLT<Matrix> post_prec_;
  Vector coef_mean_;
  double log_lik_ = 0.0;
};

struct Tau2Prior {
  double d0 = 0.5;
  double d1 = 0.5;
};

/// Unnormalized log density of tau under the subspace prior:
/// (tau^2)^{d1 - 1/2} / (1 + tau^2)^{d0 + d1}; half-Cauchy at d0 = d1 = 1/2.
double log_tau_prior(double tau, const Tau2Prior& prior);

/// One slice-sampler update of tau2 given f (rate uses f'(I - Phi0) f).
/// With a vanishing quadratic form the draw comes from the rate-0 limit and a
/// warning is logged.
double sample_tau2(const Vector& f, const Projection& proj, double tau2_current,
                   const Tau2Prior& prior, RandomStream& rng);

/// Robbins-Monro scaling of a random-walk proposal toward a target acceptance
/// rate; frozen once `adapting` is switched off.
struct AdaptiveStep {
  double log_scale = std::log(0.5);
  double target = 0.3;
  bool adapting = true;
  long proposals = 0;
  long accepted = 0;

  double scale() const { return std::exp(log_scale); }
  void record(bool accept);
  double acceptance_rate() const { return proposals > 0 ? static_cast<double>(accepted) / proposals : 0.0; }
};

bool metropolis_accept(double log_ratio, RandomStream& rng);

struct HyperProposal {
  KernelHyper hyper;
  double log_jacobian_ratio = 0.0;  // log q(x -> y) correction for the logit walk
};

/// Joint Gaussian step on (logit xi, logit phi).
HyperProposal propose_kernel_hyper(const KernelHyper& current, double scale, RandomStream& rng);

/// Random-walk MH for (xi, phi) under Uniform(0, 1) priors. `eval(hyper)`
/// returns an object with a `log_lik()` member; `current_eval` holds the one
/// for the current hyperparameters and is replaced on acceptance.
template <class Evaluation, class Eval>
bool sample_kernel_hyper(KernelHyper& hyper, std::optional<Evaluation>& current_eval, Eval&& eval,
                         AdaptiveStep& step, RandomStream& rng) {
  if (!current_eval) current_eval.emplace(eval(hyper));
  const HyperProposal prop = propose_kernel_hyper(hyper, step.scale(), rng);
  std::optional<Evaluation> candidate;
  bool accept = false;
  try {
    candidate.emplace(eval(prop.hyper));
    const double log_ratio = candidate->log_lik() - current_eval->log_lik() + prop.log_jacobian_ratio;
    accept = metropolis_accept(log_ratio, rng);
  } catch (const NumericalError&) {
    accept = false;
  }
  step.record(accept);
  if (accept) {
    hyper = prop.hyper;
    current_eval = std::move(candidate);
  }
  return accept;
}

}  // namespace bnpfc::gp
