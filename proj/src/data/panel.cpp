#include "bnpfc/data/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <unordered_map>

#include "bnpfc/core/errors.hpp"
#include "csv.hpp"

namespace bnpfc::data {
namespace {

bool flag_value(const std::string& cell) {
  const std::string v = detail::trim(cell);
  return v == "x" || v == "X" || v == "1" || v == "true" || v == "TRUE" || v == "yes";
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

Eigen::Index SeriesPanel::find(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Eigen::Index>(i);
  }
  return -1;
}

Vector SeriesPanel::column(std::string_view name) const {
  const auto j = find(name);
  if (j < 0) throw DataError("series '" + std::string(name) + "' not in panel");
  return values.col(j);
}

void SeriesPanel::validate() const {
  const auto n = names.size();
  if (static_cast<std::size_t>(values.cols()) != n || tcodes.size() != n ||
      moderate.size() != n || large.size() != n) {
    throw DataError("panel: series metadata length does not match number of columns");
  }
  if (static_cast<std::size_t>(values.rows()) != dates.size()) {
    throw DataError("panel: number of dates does not match number of rows");
  }
  for (std::size_t t = 1; t < dates.size(); ++t) {
    if (dates[t] - dates[t - 1] != 1) {
      throw DataError("panel: dates must be consecutive quarters; " + dates[t - 1].to_string() +
                      " is followed by " + dates[t].to_string());
    }
  }
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) throw DataError("panel: duplicate series name '" + name + "'");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (tcodes[j] < 1 || tcodes[j] > 7) {
      throw DataError("panel: series '" + names[j] + "' has unknown tcode " +
                      std::to_string(tcodes[j]));
    }
    const auto col = values.col(static_cast<Eigen::Index>(j));
    Eigen::Index first = -1;
    Eigen::Index last = -1;
    for (Eigen::Index t = 0; t < col.size(); ++t) {
      if (!std::isnan(col(t))) {
        if (first < 0) first = t;
        last = t;
      }
    }
    for (Eigen::Index t = first + 1; first >= 0 && t < last; ++t) {
      if (std::isnan(col(t))) {
        throw DataError("panel: interior missing value in series '" + names[j] + "' at " +
                        dates[static_cast<std::size_t>(t)].to_string());
      }
    }
  }
}

SeriesPanel read_panel(const std::filesystem::path& data_csv,
                       const std::filesystem::path& series_info_csv) {
  const auto rows = detail::read_csv(data_csv);
  if (rows.size() < 2) throw DataError(data_csv.string() + ": no data rows");

  SeriesPanel panel;
  const auto& header = rows.front();
  for (std::size_t j = 1; j < header.size(); ++j) panel.names.push_back(detail::trim(header[j]));
  const std::size_t n = panel.names.size();

  std::vector<std::vector<double>> columns(n);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string key = lower(detail::trim(row.front()));
    if (key == "factors" || key == "transform" || key.empty()) continue;
    panel.dates.push_back(Quarter::parse(row.front()));
    for (std::size_t j = 0; j < n; ++j) {
      double v = std::numeric_limits<double>::quiet_NaN();
      if (j + 1 < row.size()) {
        bool ok = true;
        v = detail::parse_number(row[j + 1], &ok);
        if (!ok) {
          throw DataError(data_csv.string() + ": non-numeric value '" + row[j + 1] +
                          "' for series '" + panel.names[j] + "' at " +
                          panel.dates.back().to_string());
        }
      }
      columns[j].push_back(v);
    }
  }
  panel.values.resize(static_cast<Eigen::Index>(panel.dates.size()), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t t = 0; t < panel.dates.size(); ++t) {
      panel.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = columns[j][t];
    }
  }

  panel.tcodes.assign(n, 1);
  panel.moderate.assign(n, false);
  panel.large.assign(n, false);
  const auto info = detail::read_csv(series_info_csv);
  if (info.empty()) throw DataError(series_info_csv.string() + ": empty series info file");
  std::unordered_map<std::string, std::size_t> col_of;
  for (std::size_t c = 0; c < info.front().size(); ++c) col_of[lower(detail::trim(info.front()[c]))] = c;
  for (const char* required : {"name", "tcode"}) {
    if (!col_of.count(required)) {
      throw DataError(series_info_csv.string() + ": missing column '" + required + "'");
    }
  }
  for (std::size_t r = 1; r < info.size(); ++r) {
    const auto& row = info[r];
    auto cell = [&](const char* name) -> std::string {
      auto it = col_of.find(name);
      if (it == col_of.end() || it->second >= row.size()) return {};
      return row[it->second];
    };
    const auto j = panel.find(detail::trim(cell("name")));
    if (j < 0) continue;
    bool ok = true;
    const double code = detail::parse_number(cell("tcode"), &ok);
    if (!ok || std::isnan(code)) {
      throw DataError(series_info_csv.string() + ": bad tcode for '" + cell("name") + "'");
    }
    panel.tcodes[static_cast<std::size_t>(j)] = static_cast<int>(code);
    panel.moderate[static_cast<std::size_t>(j)] = flag_value(cell("m"));
    panel.large[static_cast<std::size_t>(j)] = flag_value(cell("l"));
  }
  panel.validate();
  return panel;
}

void write_panel(const SeriesPanel& panel, const std::filesystem::path& data_csv,
                 const std::filesystem::path& series_info_csv) {
  std::ofstream out(data_csv);
  if (!out) throw DataError("cannot write " + data_csv.string());
  out << "date";
  for (const auto& name : panel.names) out << ',' << name;
  out << '\n';
  for (Eigen::Index t = 0; t < panel.num_dates(); ++t) {
    out << panel.dates[static_cast<std::size_t>(t)].to_string();
    for (Eigen::Index j = 0; j < panel.num_series(); ++j) {
      out << ',' << detail::format_number(panel.values(t, j), 12);
    }
    out << '\n';
  }
  std::ofstream info(series_info_csv);
  if (!info) throw DataError("cannot write " + series_info_csv.string());
  info << "name,tcode,M,L\n";
  for (std::size_t j = 0; j < panel.names.size(); ++j) {
    info << panel.names[j] << ',' << panel.tcodes[j] << ',' << (panel.moderate[j] ? "x" : "")
         << ',' << (panel.large[j] ? "x" : "") << '\n';
  }
}

}  // namespace bnpfc::data
