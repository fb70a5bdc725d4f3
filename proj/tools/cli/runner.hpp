#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace bnpfc::cli {

/// All origins of one (dataset, horizon) pair share a design.
struct Group {
  data::DatasetVariant dataset;
  int horizon = 1;
  data::RegressionData design;
  std::vector<Quarter> origins;
  std::string name() const;  // e.g. Moderate_h1
};

struct Cell {
  std::string model;
  std::size_t group = 0;
  Quarter origin;
  std::string stem(const std::vector<Group>& groups) const;  // {model}_{dataset}_{h}_{origin}
};

struct Plan {
  std::vector<Group> groups;
  std::vector<Cell> cells;
};

/// Loads the panel, assembles every design and enumerates the cell grid.
/// Throws DataError for unreadable data and ConfigError when the evaluation
/// window falls outside the data span.
Plan plan_run(const RunConfig& config);

struct Layout {
  std::filesystem::path root;
  std::filesystem::path draws_dir() const { return root / "draws"; }
  std::filesystem::path cells_dir() const { return root / "cells"; }
  std::filesystem::path traces_dir() const { return root / "traces"; }
  std::filesystem::path report_dir() const { return root / "report"; }
  std::filesystem::path manifest() const { return root / "manifest.json"; }
};

struct RunSummary {
  int total = 0;
  int skipped = 0;  // already complete from an earlier run
  int completed = 0;
  std::vector<std::string> failures;
};

/// Runs every missing cell on a pool of `config.workers` threads. A cell is
/// complete once its record file exists; records are written last and by
/// rename, so interrupted cells are rerun.
RunSummary execute(const RunConfig& config, const Plan& plan);

/// Reads one cell record; nullopt if the cell has not completed.
std::optional<nlohmann::json> read_cell_record(const Layout& layout, const std::string& stem);

void write_manifest(const RunConfig& config, const Plan& plan, const RunSummary& summary);

/// Draws as one column with a header, or as raw little-endian doubles
/// preceded by a uint64 count.
void write_draws(const std::vector<double>& draws, const std::filesystem::path& path, DrawsFormat format);
std::vector<double> read_draws(const std::filesystem::path& path);

}  // namespace bnpfc::cli
