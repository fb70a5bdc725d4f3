#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bnpfc/core/linalg.hpp"
#include "bnpfc/core/random.hpp"
#include "bnpfc/data/regression.hpp"
#include "bnpfc/errmodel/error_model.hpp"
#include "bnpfc/gp/kernel.hpp"
#include "bnpfc/gp/projection.hpp"
#include "bnpfc/gp/sampling.hpp"
#include "bnpfc/ssm/ffbs.hpp"

namespace bnpfc::engine {

enum class MeanKind { UC, Linear, GP, GPSub };

std::string to_string(MeanKind kind);
MeanKind parse_mean_kind(std::string_view text);

/// Random-walk trend of the UC benchmark.
struct UcPrior {
  double var_shape = 3.0;  // sigma_eta^2 ~ InvGamma(var_shape, var_scale)
  double var_scale = 0.2;
  double init_var = 10.0;  // trend_1 ~ N(y_1, init_var)
};

/// Prior of the Linear mean on the column space of the projection basis.
/// Flat gives the OLS (GLS under heteroskedastic errors) fit; KernelLimit is
/// the tau2 -> 0 limit of the subspace kernel, N(0, Q (Q' K^{-1} Q)^{-1} Q'),
/// and keeps the kernel hyperparameters.
enum class LinearPrior { Flat, KernelLimit };

struct ModelPriors {
  errmodel::ErrorPriors error;
  gp::Tau2Prior tau2;
  UcPrior uc;
  LinearPrior linear = LinearPrior::Flat;
};

struct ModelSpec {
  MeanKind mean = MeanKind::GP;
  errmodel::ErrorKind error = errmodel::ErrorKind::Homosk;
  data::DatasetSpec dataset;
  ModelPriors priors;

  int horizon() const { return dataset.horizon; }
  /// "GPSub-DPMSV" style identifier (mean kind, error kind).
  std::string id() const;
  /// The large dataset always projects on principal components.
  gp::ProjectionOptions projection_options() const;
};

/// Parses "Mean-Error" identifiers such as "UC-SV" or "GPSub-DPMSV".
ModelSpec parse_model_id(std::string_view id, const data::DatasetSpec& dataset = {});

struct McmcConfig {
  int n_iter = 20000;
  int n_burn = 10000;
  int thin = 1;
  std::uint64_t seed = 1;
  bool adapt = true;           // adapt random-walk scales during burn-in only
  double initial_step = 0.5;   // starting scale of the kernel-hyperparameter walk
  bool store_paths = true;     // keep f / trend and log-volatility paths per retained draw

  int retained() const { return (n_iter - n_burn) / thin; }
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Everything a chain conditions on. y is centered by its training mean; the
/// forecast row, when present, is on the same standardized scale as X.
struct ChainData {
  Vector y;
  double y_offset = 0.0;
  Matrix X;
  Matrix sqdist;
  std::optional<gp::Projection> proj;
  std::optional<Vector> x_new;
  int horizon = 1;

  Eigen::Index rows() const { return y.size(); }
};

/// Builds chain inputs from an estimation window (UC only keeps y).
ChainData make_chain_data(const ModelSpec& spec, const Vector& y, const Matrix& X,
                          const std::optional<Vector>& x_new = std::nullopt);

struct GpBlock {
  Vector f;
  gp::KernelHyper hyper;
  double tau2 = 1.0;
  gp::AdaptiveStep step;
  Vector coef;  // basis coordinates of f (Linear only)
};

struct TrendBlock {
  Vector path;
  double var = 0.1;
};

struct ChainState {
  std::optional<GpBlock> gp;
  std::optional<TrendBlock> trend;
  errmodel::ErrorState error;

  /// f or the trend.
  const Vector& fit() const { return gp ? gp->f : trend->path; }
};

ChainState init_chain(const ModelSpec& spec, const ChainData& data, const McmcConfig& config = {});

/// Throws NumericalError naming the block if the state has the wrong shape or
/// non-finite entries.
void check_chain_state(const ModelSpec& spec, const ChainState& state, Eigen::Index T);

/// One sweep: error block given eps = y - fit, then the mean block (tau2,
/// kernel hyperparameters under the collapsed likelihood, then f; or the
/// trend path and its innovation variance).
void mcmc_step(const ModelSpec& spec, const ChainData& data, ChainState& state, RandomStream& rng,
               bool adapting = false);

/// Random-walk trend observed through y_t - obs_mean_t with variances obs_var_t,
/// started at N(y_1 - obs_mean_1, prior.init_var).
ssm::ScalarStateSpace uc_state_space(const Vector& y, const Vector& obs_mean, const Vector& obs_var, double trend_var,
                                     const UcPrior& prior);

/// FFBS draw of the random-walk trend given observations y_t ~ N(trend_t + obs_mean_t, obs_var_t).
Vector uc_trend_path(const Vector& y, const Vector& obs_mean, const Vector& obs_var, double trend_var,
                     const UcPrior& prior, RandomStream& rng);

/// Trend path, then sigma_eta^2 from its InvGamma conditional.
void uc_trend_update(const Vector& y, TrendBlock& trend, const errmodel::ErrorState& error, const UcPrior& prior,
                     RandomStream& rng);

}  // namespace bnpfc::engine
