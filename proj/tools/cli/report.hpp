#pragma once

#include <string>
#include <vector>

#include "cli/runner.hpp"

namespace bnpfc::cli {

/// Cells the report could not use, as "group: cell" strings.
struct ReportGaps {
  std::vector<std::string> missing;
};

/// Builds score files, the relative table, cumulative paths, subsample QS
/// ratios, calibration curves and sampler-efficiency summaries for every
/// group from the completed cell records under `config.out`.
ReportGaps write_report(const RunConfig& config, const Plan& plan);

/// Quantile-LASSO summaries of `model`'s predictive quantile paths per group.
/// Returns the number of groups summarized.
int summarize_lasso(const RunConfig& config, const Plan& plan, const std::string& model);

}  // namespace bnpfc::cli
