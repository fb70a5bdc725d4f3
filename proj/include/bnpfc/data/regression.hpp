#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bnpfc/core/linalg.hpp"
#include "bnpfc/core/quarter.hpp"
#include "bnpfc/data/panel.hpp"

namespace bnpfc::data {

enum class DatasetVariant { AR1, Moderate, Large };

std::string to_string(DatasetVariant v);
DatasetVariant parse_dataset_variant(std::string_view text);

struct DatasetSpec {
  DatasetVariant variant = DatasetVariant::Moderate;
  std::string target_series = "CPIAUCSL";
  int horizon = 1;
  bool include_expectations = true;
  std::string expectations_series = "INFEXP";
};

/// Direct-forecast design: row t pairs predictors dated origin_dates[t] with the
/// target realized at origin_dates[t] + horizon.
struct RegressionData {
  Vector y;
  Matrix X;
  std::vector<std::string> columns;
  std::vector<Quarter> origin_dates;
  int horizon = 1;

  Eigen::Index rows() const { return y.size(); }
  Eigen::Index num_predictors() const { return X.cols(); }
  Quarter target_date(Eigen::Index t) const { return origin_dates[static_cast<std::size_t>(t)] + horizon; }
};

/// Builds the full-sample aligned (unstandardized) design for a dataset spec
/// from a raw panel. Throws DataError when the target is absent or the
/// aligned sample is empty.
RegressionData assemble_regression(const SeriesPanel& raw, const DatasetSpec& spec);

struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Matrix& X);
  Matrix apply(const Matrix& X) const;
  Vector apply_row(const Vector& x) const;
};

/// Estimation sample available at a forecast origin plus the forecast row.
struct ForecastWindow {
  Quarter origin;
  Quarter target_date;
  RegressionData train;  // standardized with in-window statistics
  Vector x_new;          // standardized forecast row (dated at origin)
  Vector x_new_raw;
  double realized = 0.0; // outcome at target_date
  Standardizer standardizer;
};

/// Training rows are those whose target is realized at or before `origin`.
/// Throws DataError if `origin` has no predictor row.
ForecastWindow make_window(const RegressionData& full, Quarter origin);

/// Row index of an origin date, if present.
std::optional<Eigen::Index> find_origin(const RegressionData& data, Quarter origin);

/// Writes date, target date, y and X columns as CSV.
void write_design_csv(const RegressionData& data, const std::filesystem::path& path);

}  // namespace bnpfc::data
