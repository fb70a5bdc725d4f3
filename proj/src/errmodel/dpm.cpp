#include "bnpfc/errmodel/dpm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/core/log.hpp"

namespace bnpfc::errmodel {
namespace {

double log_normal(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

}  // namespace

std::vector<int> DpmState::counts() const {
  std::vector<int> n(sticks.size(), 0);
  for (int a : alloc) ++n[static_cast<std::size_t>(a)];
  return n;
}

int DpmState::occupied() const {
  int k = 0;
  for (int c : counts()) k += c > 0 ? 1 : 0;
  return k;
}

std::vector<double> stick_to_weights(std::span<const double> sticks) {
  std::vector<double> w(sticks.size());
  double remaining = 1.0;
  for (std::size_t j = 0; j < sticks.size(); ++j) {
    w[j] = sticks[j] * remaining;
    remaining *= 1.0 - sticks[j];
  }
  return w;
}

std::vector<double> sample_sticks(std::span<const int> alloc, double alpha, int J, RandomStream& rng) {
  std::vector<int> n(static_cast<std::size_t>(J), 0);
  for (int a : alloc) ++n[static_cast<std::size_t>(a)];
  std::vector<double> sticks(static_cast<std::size_t>(J), 1.0);
  long above = static_cast<long>(alloc.size());
  for (int j = 0; j + 1 < J; ++j) {
    above -= n[static_cast<std::size_t>(j)];
    double s = rng.beta(1.0 + n[static_cast<std::size_t>(j)], alpha + static_cast<double>(above));
    sticks[static_cast<std::size_t>(j)] = std::clamp(s, 1e-300, 1.0 - 1e-16);
  }
  return sticks;
}

double slice_level(double kappa, int j) { return (1.0 - kappa) * std::pow(kappa, j); }

int allocatable_count(double kappa, double u) {
  if (u >= 1.0 - kappa) return 0;
  // varpi_j > u  <=>  j < log(u / (1 - kappa)) / log(kappa)
  const double bound = std::log(u / (1.0 - kappa)) / std::log(kappa);
  int n = static_cast<int>(std::ceil(bound));
  while (n > 0 && !(slice_level(kappa, n - 1) > u)) --n;
  while (slice_level(kappa, n) > u) ++n;
  return n;
}

int update_truncation(std::span<const double> weights, std::span<const double> slice_u) {
  const double u_min = *std::min_element(slice_u.begin(), slice_u.end());
  double cum = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    cum += weights[j];
    if (1.0 - cum < u_min) return static_cast<int>(j + 1);
  }
  return static_cast<int>(weights.size());
}

int extend_sticks_until(std::vector<double>& sticks, double alpha, double tail, int cap, RandomStream& rng) {
  double remaining = 1.0;
  for (std::size_t j = 0; j < sticks.size(); ++j) {
    remaining *= 1.0 - sticks[j];
    if (remaining < tail) return static_cast<int>(j + 1);
  }
  while (remaining >= tail && static_cast<int>(sticks.size()) < cap) {
    sticks.push_back(rng.beta(1.0, alpha));
    remaining *= 1.0 - sticks.back();
  }
  return static_cast<int>(sticks.size());
}

void sample_slice_and_alloc(const Vector& resid, const Vector& obs_var, DpmState& state, const DpmPrior& prior,
                            RandomStream& rng) {
  const auto T = static_cast<std::size_t>(resid.size());
  state.slice_u.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    state.slice_u[t] = rng.uniform() * slice_level(prior.kappa, state.alloc[t]);
  }
  resize_components(state, prior, obs_var.size() == 0, rng);
  allocate_given_slices(resid, obs_var, state, prior, rng);
}

void allocate_given_slices(const Vector& resid, const Vector& obs_var, DpmState& state, const DpmPrior& prior,
                           RandomStream& rng) {
  const auto T = static_cast<std::size_t>(resid.size());
  const int J = state.num_components();
  std::vector<double> log_mass(static_cast<std::size_t>(J));
  std::vector<double> log_w(static_cast<std::size_t>(J));
  std::vector<double> log_level(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    log_w[static_cast<std::size_t>(j)] = std::log(state.weights[static_cast<std::size_t>(j)]);
    log_level[static_cast<std::size_t>(j)] = std::log(slice_level(prior.kappa, j));
  }
  bool warned = false;
  for (std::size_t t = 0; t < T; ++t) {
    const int n = std::min(allocatable_count(prior.kappa, state.slice_u[t]), J);
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int j = 0; j < n; ++j) {
      const double var = obs_var.size() ? obs_var(static_cast<Eigen::Index>(t)) : state.var[static_cast<std::size_t>(j)];
      const double lm = log_w[static_cast<std::size_t>(j)] - log_level[static_cast<std::size_t>(j)] +
                        log_normal(resid(static_cast<Eigen::Index>(t)), state.mean[static_cast<std::size_t>(j)], var);
      log_mass[static_cast<std::size_t>(j)] = lm;
      if (lm > best) best = lm, arg = j;
    }
    if (!std::isfinite(best)) {
      if (!warned) log_warning("DPM allocation: all candidate masses underflow; assigning to the best component");
      warned = true;
      state.alloc[t] = arg;
      continue;
    }
    state.alloc[t] = static_cast<int>(rng.categorical_from_log(log_mass.data(), static_cast<std::size_t>(n)));
  }
}

void resize_components(DpmState& state, const DpmPrior& prior, bool with_var, RandomStream& rng) {
  const double u_min = *std::min_element(state.slice_u.begin(), state.slice_u.end());
  int max_alloc = 0;
  for (int a : state.alloc) max_alloc = std::max(max_alloc, a);
  int J = std::max(allocatable_count(prior.kappa, u_min), max_alloc + 1) + 1;
  if (J > prior.max_components) {
    log_warning("DPM truncation capped at " + std::to_string(prior.max_components) + " components");
    J = prior.max_components;
  }
  const auto old = static_cast<int>(state.sticks.size());
  if (J < old) {
    state.sticks.resize(static_cast<std::size_t>(J));
    state.mean.resize(static_cast<std::size_t>(J));
    if (with_var) state.var.resize(static_cast<std::size_t>(J));
  }
  for (int j = old; j < J; ++j) {
    state.sticks.push_back(rng.beta(1.0, state.alpha));
    state.mean.push_back(rng.normal(0.0, std::sqrt(prior.mean_var)));
    if (with_var) state.var.push_back(1.0 / rng.gamma(prior.var_shape, prior.var_rate));
  }
  // Earlier terminal stick becomes an ordinary stick when the set grows.
  if (J > old && old > 0) state.sticks[static_cast<std::size_t>(old - 1)] = rng.beta(1.0, state.alpha);
  state.sticks.back() = 1.0;
  state.weights = stick_to_weights(state.sticks);
}

double alpha_log_posterior(double alpha, std::span<const double> sticks, const DpmPrior& prior) {
  if (!(alpha > 0.0)) return -std::numeric_limits<double>::infinity();
  double lp = (prior.alpha_shape - 1.0) * std::log(alpha) - prior.alpha_rate * alpha;
  for (std::size_t j = 0; j + 1 < sticks.size(); ++j) lp += std::log(alpha) + (alpha - 1.0) * std::log1p(-sticks[j]);
  return lp;
}

void sample_alpha(DpmState& state, const DpmPrior& prior, RandomStream& rng) {
  const double proposal = state.alpha * std::exp(state.alpha_step.scale() * rng.normal());
  // Log-scale walk: the Jacobian adds log(alpha) to the target.
  const double log_ratio = alpha_log_posterior(proposal, state.sticks, prior) + std::log(proposal) -
                           alpha_log_posterior(state.alpha, state.sticks, prior) - std::log(state.alpha);
  const bool accept = gp::metropolis_accept(log_ratio, rng);
  state.alpha_step.record(accept);
  if (accept) state.alpha = proposal;
}

void sample_component_means(const Vector& resid, const Vector& obs_var, DpmState& state, const DpmPrior& prior,
                            RandomStream& rng) {
  const auto J = static_cast<std::size_t>(state.num_components());
  std::vector<double> prec(J, 1.0 / prior.mean_var), lin(J, 0.0);
  for (Eigen::Index t = 0; t < resid.size(); ++t) {
    const auto j = static_cast<std::size_t>(state.alloc[static_cast<std::size_t>(t)]);
    const double var = obs_var.size() ? obs_var(t) : state.var[j];
    prec[j] += 1.0 / var;
    lin[j] += resid(t) / var;
  }
  for (std::size_t j = 0; j < J; ++j) {
    const double v = 1.0 / prec[j];
    state.mean[j] = rng.normal(v * lin[j], std::sqrt(v));
  }
}

void sample_component_vars(const Vector& resid, DpmState& state, const DpmPrior& prior, RandomStream& rng) {
  const auto J = static_cast<std::size_t>(state.num_components());
  std::vector<double> n(J, 0.0), ss(J, 0.0);
  for (Eigen::Index t = 0; t < resid.size(); ++t) {
    const auto j = static_cast<std::size_t>(state.alloc[static_cast<std::size_t>(t)]);
    const double d = resid(t) - state.mean[j];
    n[j] += 1.0;
    ss[j] += d * d;
  }
  for (std::size_t j = 0; j < J; ++j) {
    state.var[j] = rng.inverse_gamma(prior.var_shape + 0.5 * n[j], prior.var_rate + 0.5 * ss[j]);
  }
}

DpmState init_dpm(Eigen::Index T, double var0, const DpmPrior& prior, bool with_var) {
  DpmState s;
  s.alpha = 0.5;
  s.alloc.assign(static_cast<std::size_t>(T), 0);
  s.slice_u.assign(static_cast<std::size_t>(T), 0.5 * slice_level(prior.kappa, 0));
  s.sticks = {1.0};
  s.mean = {0.0};
  if (with_var) s.var = {var0};
  s.weights = {1.0};
  return s;
}

void dpm_sweep(const Vector& resid, const Vector& obs_var, DpmState& state, const DpmPrior& prior, RandomStream& rng) {
  const bool with_var = obs_var.size() == 0;
  sample_slice_and_alloc(resid, obs_var, state, prior, rng);
  state.sticks = sample_sticks(state.alloc, state.alpha, state.num_components(), rng);
  state.weights = stick_to_weights(state.sticks);
  sample_alpha(state, prior, rng);
  sample_component_means(resid, obs_var, state, prior, rng);
  if (with_var) sample_component_vars(resid, state, prior, rng);
}

void check_dpm_state(const DpmState& s, Eigen::Index T) {
  std::ostringstream why;
  const int J = s.num_components();
  double total = 0.0;
  for (double w : s.weights) total += w;
  if (J < 1 || s.weights.size() != s.sticks.size() || s.mean.size() != s.sticks.size()) why << "size mismatch; ";
  if (std::abs(total - 1.0) > 1e-12) why << "weights sum to " << total << "; ";
  if (!(s.alpha > 0.0)) why << "alpha " << s.alpha << "; ";
  if (static_cast<Eigen::Index>(s.alloc.size()) != T) why << "allocation length; ";
  for (int a : s.alloc) {
    if (a < 0 || a >= J || !(s.weights[static_cast<std::size_t>(a)] > 0.0)) {
      why << "allocation " << a << " invalid; ";
      break;
    }
  }
  for (double v : s.var) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      why << "non-positive component variance; ";
      break;
    }
  }
  if (!why.str().empty()) throw NumericalError("DPM state invariant violated: " + why.str());
}

}  // namespace bnpfc::errmodel
