#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bnpfc/core/linalg.hpp"
#include "bnpfc/core/quarter.hpp"

namespace bnpfc::data {

/// Quarterly multivariate panel. Missing values are NaN and may only occur at
/// the start or end of a series.
struct SeriesPanel {
  std::vector<Quarter> dates;
  std::vector<std::string> names;
  Matrix values;            // dates x series
  std::vector<int> tcodes;  // transformation code per series, 1..7
  std::vector<bool> moderate;  // "M" membership flag
  std::vector<bool> large;     // "L" membership flag

  Eigen::Index num_dates() const { return values.rows(); }
  Eigen::Index num_series() const { return values.cols(); }
  /// Column index of a series, or -1.
  Eigen::Index find(std::string_view name) const;
  Vector column(std::string_view name) const;

  /// Throws DataError on: non-quarterly or unsorted dates, duplicate names,
  /// size mismatches, unknown tcodes, interior missing values.
  void validate() const;
};

/// Reads a panel CSV (first column dates, header row of series names) and the
/// sidecar CSV with columns name,tcode,M,L. Series missing from the sidecar get
/// tcode 1 and no membership flags.
SeriesPanel read_panel(const std::filesystem::path& data_csv,
                       const std::filesystem::path& series_info_csv);

void write_panel(const SeriesPanel& panel, const std::filesystem::path& data_csv,
                 const std::filesystem::path& series_info_csv);

}  // namespace bnpfc::data
