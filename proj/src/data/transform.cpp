#include "bnpfc/data/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bnpfc::data {
namespace {

std::vector<double> diff(const std::vector<double>& x) {
  std::vector<double> out;
  if (x.size() < 2) return out;
  out.reserve(x.size() - 1);
  for (std::size_t t = 1; t < x.size(); ++t) out.push_back(x[t] - x[t - 1]);
  return out;
}

std::vector<double> logs(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (!(x[t] > 0.0)) {
      throw TransformError("log transformation of non-positive value " + std::to_string(x[t]), t);
    }
    out[t] = std::log(x[t]);
  }
  return out;
}

}  // namespace

int differencing_order(int code) {
  switch (code) {
    case 1:
    case 4:
      return 0;
    case 2:
    case 5:
      return 1;
    case 3:
    case 6:
    case 7:
      return 2;
    default:
      throw DataError("unknown transformation code " + std::to_string(code));
  }
}

std::vector<double> apply_transform(std::span<const double> series, int code) {
  const int order = differencing_order(code);
  if (series.size() <= static_cast<std::size_t>(order)) {
    throw TransformError("series too short for transformation code " + std::to_string(code),
                         series.empty() ? 0 : series.size() - 1);
  }
  std::vector<double> x(series.begin(), series.end());
  switch (code) {
    case 1:
      return x;
    case 2:
      return diff(x);
    case 3:
      return diff(diff(x));
    case 4:
      return logs(series);
    case 5:
      return diff(logs(series));
    case 6:
      return diff(diff(logs(series)));
    case 7: {
      std::vector<double> growth;
      growth.reserve(x.size() - 1);
      for (std::size_t t = 1; t < x.size(); ++t) {
        if (x[t - 1] == 0.0) throw TransformError("growth rate relative to a zero value", t - 1);
        growth.push_back(x[t] / x[t - 1] - 1.0);
      }
      return diff(growth);
    }
    default:
      break;
  }
  throw DataError("unknown transformation code " + std::to_string(code));
}

SeriesPanel transform_panel(const SeriesPanel& raw) {
  raw.validate();
  SeriesPanel out = raw;
  const Eigen::Index T = raw.num_dates();
  int max_order = 0;
  for (std::size_t j = 0; j < raw.names.size(); ++j) {
    max_order = std::max(max_order, differencing_order(raw.tcodes[j]));
  }
  out.values.setConstant(std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index j = 0; j < raw.num_series(); ++j) {
    const auto col = raw.values.col(j);
    Eigen::Index first = 0;
    while (first < T && std::isnan(col(first))) ++first;
    Eigen::Index last = T - 1;
    while (last >= first && std::isnan(col(last))) --last;
    if (first > last) continue;
    std::vector<double> span(col.data() + first, col.data() + last + 1);
    const int code = raw.tcodes[static_cast<std::size_t>(j)];
    std::vector<double> transformed;
    try {
      transformed = apply_transform(span, code);
    } catch (const TransformError& e) {
      const auto at = static_cast<std::size_t>(first) + e.index();
      throw DataError("series '" + raw.names[static_cast<std::size_t>(j)] + "' at " +
                      raw.dates[at].to_string() + ": " + e.what());
    }
    const Eigen::Index offset = first + differencing_order(code);
    for (std::size_t k = 0; k < transformed.size(); ++k) {
      out.values(offset + static_cast<Eigen::Index>(k), j) = transformed[k];
    }
  }
  // Drop rows that every differencing-heavy series lost, for all series alike.
  if (max_order > 0 && T > max_order) {
    out.values = out.values.bottomRows(T - max_order).eval();
    out.dates.erase(out.dates.begin(), out.dates.begin() + max_order);
  }
  out.tcodes.assign(out.names.size(), 1);
  return out;
}

std::vector<double> build_target(std::span<const double> price, int horizon) {
  if (horizon < 1) throw DataError("horizon must be >= 1");
  if (static_cast<std::size_t>(horizon) >= price.size()) {
    throw DataError("empty target: horizon " + std::to_string(horizon) +
                    " is not shorter than the price series (" + std::to_string(price.size()) + ")");
  }
  std::vector<double> y(price.size() - static_cast<std::size_t>(horizon));
  const double scale = 400.0 / horizon;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double p0 = price[t];
    const double p1 = price[t + static_cast<std::size_t>(horizon)];
    if (!(p0 > 0.0) || !(p1 > 0.0)) {
      y[t] = std::numeric_limits<double>::quiet_NaN();
      if (!std::isnan(p0) && !std::isnan(p1)) {
        throw DataError("price index must be strictly positive");
      }
      continue;
    }
    y[t] = scale * std::log(p1 / p0);
  }
  return y;
}

}  // namespace bnpfc::data
