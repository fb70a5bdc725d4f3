#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "bnpfc/core/quarter.hpp"
#include "bnpfc/data/regression.hpp"
#include "bnpfc/engine/model.hpp"

namespace bnpfc::cli {

enum class DrawsFormat { Csv, Bin };

struct RunConfig {
  std::filesystem::path panel;
  std::filesystem::path series_info;
  std::vector<data::DatasetVariant> datasets{data::DatasetVariant::Moderate};
  std::string target = "CPIAUCSL";
  bool include_expectations = true;
  std::string expectations_series = "INFEXP";
  std::vector<std::string> models;
  std::vector<int> horizons{1};
  Quarter eval_start = Quarter::from_year_quarter(1980, 1);
  Quarter eval_end = Quarter::from_year_quarter(2021, 3);
  int min_train = 40;
  int max_origins = 0;  // 0 keeps every origin; otherwise the first n
  std::string benchmark = "UC-SV";
  engine::McmcConfig mcmc;
  engine::LinearPrior linear_prior = engine::LinearPrior::Flat;
  std::filesystem::path out = "run";
  int workers = 1;
  DrawsFormat draws_format = DrawsFormat::Csv;
  bool dump_traces = false;
  std::string lasso_model = "GP-DPMSV";
  int lasso_folds = 5;

  data::DatasetSpec dataset_spec(data::DatasetVariant variant, int horizon) const;
  engine::ModelSpec model_spec(const std::string& id, data::DatasetVariant variant, int horizon) const;
};

/// Every mean kind crossed with every error kind.
std::vector<std::string> all_model_ids();

/// Parses a config document. Relative paths resolve against `base_dir`.
/// Throws ConfigError naming the offending field path.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Reads a config file, or the "config" member of a run manifest.
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved config with absolute paths, suitable for a manifest.
nlohmann::json to_json(const RunConfig& config);

std::string to_string(DrawsFormat f);

}  // namespace bnpfc::cli
