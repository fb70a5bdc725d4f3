#pragma once

#include <span>
#include <vector>

#include "bnpfc/core/linalg.hpp"
#include "bnpfc/core/random.hpp"
#include "bnpfc/gp/sampling.hpp"

namespace bnpfc::errmodel {

struct DpmPrior {
  double mean_var = 4.0;     // mu_j ~ N(0, mean_var)
  double var_shape = 10.0;   // sigma_j^{-2} ~ Gamma(var_shape, rate var_rate)
  double var_rate = 5.0;
  double alpha_shape = 2.0;  // alpha ~ Gamma(alpha_shape, rate alpha_rate)
  double alpha_rate = 4.0;
  double kappa = 0.8;        // slice sequence varpi_j = (1 - kappa) kappa^{j-1}
  int max_components = 100;
};

/// Truncated stick-breaking mixture state. Components are 0-based here; the
/// last instantiated stick is 1 so the weights sum to one.
struct DpmState {
  std::vector<double> sticks;
  std::vector<double> weights;
  std::vector<double> mean;
  std::vector<double> var;      // unused when a common SV variance is supplied
  std::vector<int> alloc;       // component of each observation
  std::vector<double> slice_u;
  double alpha = 0.5;
  gp::AdaptiveStep alpha_step{std::log(0.5), 0.3};

  int num_components() const { return static_cast<int>(sticks.size()); }
  std::vector<int> counts() const;
  int occupied() const;
};

/// w_1 = s_1, w_j = s_j prod_{i<j} (1 - s_i).
std::vector<double> stick_to_weights(std::span<const double> sticks);

/// s_j ~ Beta(1 + T_j, alpha + sum_{i>j} T_i) for j < J - 1; s_{J-1} = 1.
std::vector<double> sample_sticks(std::span<const int> alloc, double alpha, int J, RandomStream& rng);

/// varpi_j (0-based j).
double slice_level(double kappa, int j);

/// Number of components whose slice level exceeds u (the allocatable set).
int allocatable_count(double kappa, double u);

/// Smallest J with 1 - sum_{j<=J} w_j < min(u), capped at weights.size().
int update_truncation(std::span<const double> weights, std::span<const double> slice_u);

/// Appends prior sticks Beta(1, alpha) to an open stick sequence until the
/// remaining mass falls below `tail`; returns the number of sticks needed.
int extend_sticks_until(std::vector<double>& sticks, double alpha, double tail, int cap, RandomStream& rng);

/// u_t ~ U(0, varpi_{alloc_t}) followed by allocation with mass
/// 1{u_t < varpi_j} / varpi_j * w_j * N(eps_t; mu_j, var_t) over instantiated
/// components. `obs_var` (if non-empty) replaces the component variances.
void sample_slice_and_alloc(const Vector& resid, const Vector& obs_var, DpmState& state, const DpmPrior& prior,
                            RandomStream& rng);

/// Allocation step alone, for the current slices and instantiated components.
void allocate_given_slices(const Vector& resid, const Vector& obs_var, DpmState& state, const DpmPrior& prior,
                           RandomStream& rng);

/// Sizes the instantiated set to cover every allocatable component of the
/// current slices plus the occupied ones, drawing new components from the prior.
void resize_components(DpmState& state, const DpmPrior& prior, bool with_var, RandomStream& rng);

/// RW-MH on log alpha against prod_{j<J-1} Beta(s_j; 1, alpha) x Gamma prior.
void sample_alpha(DpmState& state, const DpmPrior& prior, RandomStream& rng);
double alpha_log_posterior(double alpha, std::span<const double> sticks, const DpmPrior& prior);

/// Conjugate normal update; obs_var empty means component variances.
void sample_component_means(const Vector& resid, const Vector& obs_var, DpmState& state, const DpmPrior& prior,
                            RandomStream& rng);
void sample_component_vars(const Vector& resid, DpmState& state, const DpmPrior& prior, RandomStream& rng);

/// Single occupied component with mean 0 (and variance var0).
DpmState init_dpm(Eigen::Index T, double var0, const DpmPrior& prior, bool with_var);

/// One full sweep: slices, truncation, allocation, sticks, alpha, means, variances.
void dpm_sweep(const Vector& resid, const Vector& obs_var, DpmState& state, const DpmPrior& prior, RandomStream& rng);

/// Checks the documented state invariants; throws NumericalError on violation.
void check_dpm_state(const DpmState& state, Eigen::Index T);

}  // namespace bnpfc::errmodel
