#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bnpfc/core/quarter.hpp"
#include "bnpfc/core/random.hpp"
#include "bnpfc/eval/scores.hpp"

namespace bnpfc::eval {

/// Per-origin scores of one model, indexed by outcome date.
struct ScorePanel {
  std::string model;
  std::vector<double> p_grid = kQuantileGrid;
  std::vector<Quarter> dates;
  std::vector<double> realized;
  std::vector<double> point;
  std::vector<double> sq_error;
  std::vector<double> lpl;
  std::vector<double> pit;
  std::vector<std::vector<double>> qs;  // qs[k][i]: p_grid[k] at origin i

  ScorePanel() : qs(kQuantileGrid.size()) {}
  std::size_t size() const { return dates.size(); }
  /// Throws DataError when the arrays disagree in length or a QS is negative.
  void check() const;
};

/// Scores one predictive sample (point = draw mean, quantiles by type 7).
void add_score(ScorePanel& panel, Quarter date, double realized, std::span<const double> draws,
               const DrawMixtures& mixtures, RandomStream& rng);

double mse(std::span<const double> sq_errors);
double mean(std::span<const double> x);

/// Throws DataError unless both panels score the same outcome dates.
void check_aligned(const ScorePanel& model, const ScorePanel& benchmark);

/// One row of the relative table. The benchmark row holds levels (MSE, mean
/// LPL, mean QS); other rows hold MSE and QS ratios and the mean LPL difference.
struct TableRow {
  std::string model;
  bool benchmark = false;
  bool absent = false;
  double mse = 0.0;
  double lpl = 0.0;
  std::vector<double> qs;
};

TableRow relative_row(const ScorePanel& model, const ScorePanel& benchmark);
TableRow level_row(const ScorePanel& benchmark);

/// Running sum of model - benchmark (higher is better, e.g. LPL) or of
/// benchmark - model (lower is better, e.g. QS), so the path rises when the
/// model does better.
std::vector<double> cumulative_path(std::span<const double> model, std::span<const double> benchmark,
                                    bool lower_is_better);

struct Window {
  std::string label;
  Quarter start;
  Quarter end;
};

/// 1980-1990, 1991-2000, 2001-2010, 2011-2021.
std::vector<Window> default_subsample_windows();

struct SubsampleRow {
  std::string model;
  std::string window;
  int count = 0;
  std::vector<double> qs_ratio;
};

/// Mean QS ratio against the benchmark within each window; empty windows are
/// omitted.
std::vector<SubsampleRow> subsample_average(const ScorePanel& model, const ScorePanel& benchmark,
                                            const std::vector<Window>& windows);

/// sqrt(-log(level / 2) / 2): asymptotic Kolmogorov critical value (1.358 at 0.05).
double kolmogorov_critical(double level);

/// Asymptotic p-value of the one-sample KS test of uniformity.
double ks_uniform_pvalue(std::span<const double> pits);

struct CalibrationCurve {
  std::vector<double> grid;
  std::vector<double> ecdf;
  double band = 0.0;  // half-width around the 45 degree line
  int n = 0;
  /// Every QQ point within the band.
  bool inside() const;
};

/// Empirical CDF of the PITs on `grid` with the iid Kolmogorov band at `level`.
CalibrationCurve rs_diagnostic(std::span<const double> pits, std::span<const double> grid, double level = 0.05);

/// Uniform grid 0, 1/(n-1), ..., 1.
std::vector<double> unit_grid(int n = 101);

void write_scores_csv(const ScorePanel& panel, const std::filesystem::path& path);
/// Reads a file written by write_scores_csv.
ScorePanel read_scores_csv(const std::filesystem::path& path, const std::string& model);
void write_table_csv(const std::vector<TableRow>& rows, const std::vector<double>& p_grid,
                     const std::filesystem::path& path);
void write_cumulative_csv(const std::vector<Quarter>& dates, const std::vector<std::string>& names,
                          const std::vector<std::vector<double>>& paths, const std::filesystem::path& path);
void write_subsamples_csv(const std::vector<SubsampleRow>& rows, const std::vector<double>& p_grid,
                          const std::filesystem::path& path);
void write_calibration_csv(const CalibrationCurve& curve, const std::filesystem::path& path);

}  // namespace bnpfc::eval
