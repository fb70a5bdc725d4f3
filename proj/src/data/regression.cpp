#include "bnpfc/data/regression.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/core/log.hpp"
#include "bnpfc/data/transform.hpp"
#include "csv.hpp"

namespace bnpfc::data {

std::string to_string(DatasetVariant v) {
  switch (v) {
    case DatasetVariant::AR1:
      return "AR1";
    case DatasetVariant::Moderate:
      return "Moderate";
    case DatasetVariant::Large:
      return "Large";
  }
  return "?";
}

DatasetVariant parse_dataset_variant(std::string_view text) {
  if (text == "AR1" || text == "AR(1)") return DatasetVariant::AR1;
  if (text == "Moderate") return DatasetVariant::Moderate;
  if (text == "Large") return DatasetVariant::Large;
  throw ConfigError("unknown dataset variant '" + std::string(text) + "'");
}

RegressionData assemble_regression(const SeriesPanel& raw, const DatasetSpec& spec) {
  raw.validate();
  const Eigen::Index target_col = raw.find(spec.target_series);
  if (target_col < 0) throw DataError("target series '" + spec.target_series + "' not in panel");
  const int h = spec.horizon;
  if (h < 1) throw DataError("horizon must be >= 1");

  const Eigen::Index T = raw.num_dates();
  const Vector price = raw.values.col(target_col);
  const std::vector<double> price_vec(price.data(), price.data() + price.size());
  const std::vector<double> forward = build_target(price_vec, h);  // forward[t] realized at t + h
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // Predictor columns by raw date index.
  std::vector<std::string> columns;
  std::vector<std::vector<double>> predictors;
  if (spec.variant == DatasetVariant::AR1) {
    std::vector<double> lag(static_cast<std::size_t>(T), nan);
    for (Eigen::Index t = h; t < T; ++t) lag[static_cast<std::size_t>(t)] = forward[static_cast<std::size_t>(t - h)];
    columns.push_back(spec.target_series + "_infl_lag");
    predictors.push_back(std::move(lag));
  } else {
    SeriesPanel selected;
    selected.dates = raw.dates;
    std::vector<Eigen::Index> picked;
    for (std::size_t j = 0; j < raw.names.size(); ++j) {
      const bool member = spec.variant == DatasetVariant::Moderate ? raw.moderate[j] : raw.large[j];
      if (!member) continue;
      if (!spec.include_expectations && raw.names[j] == spec.expectations_series) continue;
      picked.push_back(static_cast<Eigen::Index>(j));
      selected.names.push_back(raw.names[j]);
      selected.tcodes.push_back(raw.tcodes[j]);
      selected.moderate.push_back(raw.moderate[j]);
      selected.large.push_back(raw.large[j]);
    }
    if (picked.empty()) {
      throw DataError("dataset " + to_string(spec.variant) + " selects no series (check M/L flags)");
    }
    selected.values.resize(T, static_cast<Eigen::Index>(picked.size()));
    for (std::size_t k = 0; k < picked.size(); ++k) {
      selected.values.col(static_cast<Eigen::Index>(k)) = raw.values.col(picked[k]);
    }
    const SeriesPanel transformed = transform_panel(selected);
    const Eigen::Index trimmed = T - transformed.num_dates();
    for (std::size_t k = 0; k < picked.size(); ++k) {
      std::vector<double> col(static_cast<std::size_t>(T), nan);
      for (Eigen::Index t = 0; t < transformed.num_dates(); ++t) {
        col[static_cast<std::size_t>(t + trimmed)] = transformed.values(t, static_cast<Eigen::Index>(k));
      }
      columns.push_back(selected.names[k]);
      predictors.push_back(std::move(col));
    }
  }

  std::vector<Eigen::Index> rows;
  for (Eigen::Index t = 0; t + h < T; ++t) {
    if (std::isnan(forward[static_cast<std::size_t>(t)])) continue;
    bool complete = true;
    for (const auto& p : predictors) complete = complete && !std::isnan(p[static_cast<std::size_t>(t)]);
    if (complete) rows.push_back(t);
  }
  if (rows.empty()) {
    throw DataError("alignment: no dates where the target at t+" + std::to_string(h) +
                    " and all predictors at t are observed");
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i] != rows[i - 1] + 1) {
      throw DataError("alignment: aligned sample has a gap at " +
                      raw.dates[static_cast<std::size_t>(rows[i - 1] + 1)].to_string());
    }
  }

  RegressionData out;
  out.horizon = h;
  out.columns = columns;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.y.resize(n);
  out.X.resize(n, static_cast<Eigen::Index>(columns.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto t = rows[static_cast<std::size_t>(i)];
    out.y(i) = forward[static_cast<std::size_t>(t)];
    out.origin_dates.push_back(raw.dates[static_cast<std::size_t>(t)]);
    for (std::size_t k = 0; k < predictors.size(); ++k) {
      out.X(i, static_cast<Eigen::Index>(k)) = predictors[k][static_cast<std::size_t>(t)];
    }
  }
  return out;
}

Standardizer Standardizer::fit(const Matrix& X) {
  Standardizer s;
  const auto n = X.rows();
  s.mean = X.colwise().mean().transpose();
  s.scale.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double ss = (X.col(j).array() - s.mean(j)).square().sum();
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    s.scale(j) = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& X) const {
  return (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Vector Standardizer::apply_row(const Vector& x) const {
  return (x - mean).cwiseQuotient(scale);
}

std::optional<Eigen::Index> find_origin(const RegressionData& data, Quarter origin) {
  for (std::size_t i = 0; i < data.origin_dates.size(); ++i) {
    if (data.origin_dates[i] == origin) return static_cast<Eigen::Index>(i);
  }
  return std::nullopt;
}

ForecastWindow make_window(const RegressionData& full, Quarter origin) {
  const auto row = find_origin(full, origin);
  if (!row) throw DataError("no predictor row dated " + origin.to_string());
  Eigen::Index n_train = 0;
  while (n_train < full.rows() && full.target_date(n_train) <= origin) ++n_train;
  if (n_train < 2) throw DataError("fewer than two training rows before " + origin.to_string());

  ForecastWindow w;
  w.origin = origin;
  w.target_date = origin + full.horizon;
  w.realized = full.y(*row);
  w.x_new_raw = full.X.row(*row).transpose();

  const Matrix X_raw = full.X.topRows(n_train);
  w.standardizer = Standardizer::fit(X_raw);
  w.train.horizon = full.horizon;
  w.train.columns = full.columns;
  w.train.y = full.y.head(n_train);
  w.train.X = w.standardizer.apply(X_raw);
  w.train.origin_dates.assign(full.origin_dates.begin(), full.origin_dates.begin() + n_train);
  w.x_new = w.standardizer.apply_row(w.x_new_raw);

  // No value dated after the origin may enter estimation.
  for (Eigen::Index t = 0; t < n_train; ++t) {
    if (w.train.target_date(t) > origin) {
      throw DataError("look-ahead: training target dated after origin " + origin.to_string());
    }
  }
  return w;
}

void write_design_csv(const RegressionData& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "origin,target_date,y";
  for (const auto& c : data.columns) out << ',' << c;
  out << '\n';
  for (Eigen::Index t = 0; t < data.rows(); ++t) {
    out << data.origin_dates[static_cast<std::size_t>(t)].to_string() << ','
        << data.target_date(t).to_string() << ',' << detail::format_number(data.y(t), 12);
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) out << ',' << detail::format_number(data.X(t, j), 12);
    out << '\n';
  }
}

}  // namespace bnpfc::data
