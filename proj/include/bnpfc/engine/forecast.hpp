#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bnpfc/core/quarter.hpp"
#include "bnpfc/engine/model.hpp"
#include "bnpfc/eval/scores.hpp"

namespace bnpfc::engine {

/// Retained output of one chain. Scalar traces are stored per name; paths are
/// columns (one per retained draw) when McmcConfig::store_paths is set.
struct PosteriorDraws {
  int retained = 0;
  std::map<std::string, std::vector<double>> traces;  // monitored scalars
  std::map<std::string, std::vector<double>> extras;  // J, occupied count, log-volatility quantiles
  Matrix fit_paths;
  Matrix log_vol_paths;
  /// Per-draw predictive mixtures at the forecast row, on the original y scale.
  eval::DrawMixtures predictive;
  std::map<std::string, double> inefficiency;
  double hyper_acceptance = 0.0;
  double alpha_acceptance = 0.0;
};

/// Runs burn-in and retention from the initial state. Deterministic given
/// config.seed. Throws NumericalError with the iteration index and block when
/// the state becomes invalid.
PosteriorDraws run_chain(const ModelSpec& spec, const ChainData& data, const McmcConfig& config);

/// Writes the scalar and extra traces as CSV columns.
void write_traces_csv(const PosteriorDraws& draws, const std::filesystem::path& path);

struct PredictiveDraws {
  std::string model;
  Quarter origin;
  Quarter target_date;
  int horizon = 1;
  std::vector<double> draws;
  double point = 0.0;
  std::vector<double> p_grid = eval::kQuantileGrid;
  std::vector<double> quantiles;
  eval::DrawMixtures mixtures;
  double realized = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
};

/// One y* per retained draw from its predictive mixture.
PredictiveDraws predictive_simulate(const ModelSpec& spec, const PosteriorDraws& draws, RandomStream& rng);

/// Origins whose outcome date origin + h lies in [eval_start, eval_end] and
/// that have at least `min_train` training rows; shorter ones are skipped with
/// a warning.
std::vector<Quarter> forecast_origins(const data::RegressionData& full, Quarter eval_start, Quarter eval_end,
                                      int min_train = 40);

/// Seed of one (model, dataset, horizon, origin) cell.
std::uint64_t cell_seed(std::uint64_t master, const ModelSpec& spec, Quarter origin);

/// Fresh chain on the window ending at `origin`, then predictive simulation.
PredictiveDraws forecast_cell(const ModelSpec& spec, const data::RegressionData& full, Quarter origin,
                              McmcConfig config, PosteriorDraws* keep = nullptr);

/// Expanding-window experiment: one independent chain per origin.
std::vector<PredictiveDraws> recursive_forecast(const ModelSpec& spec, const data::RegressionData& full,
                                                Quarter eval_start, Quarter eval_end, const McmcConfig& config,
                                                int min_train = 40);

}  // namespace bnpfc::engine
