#include "bnpfc/eval/tables.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "bnpfc/core/errors.hpp"
#include "data/csv.hpp"

namespace bnpfc::eval {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string num(double x) { return detail::format_number(x, 17); }

std::string p_label(double p) { return detail::format_number(p, 6); }

}  // namespace

void ScorePanel::check() const {
  const std::size_t n = dates.size();
  bool ok = realized.size() == n && point.size() == n && sq_error.size() == n && lpl.size() == n && pit.size() == n &&
            qs.size() == p_grid.size();
  for (const auto& q : qs) ok = ok && q.size() == n;
  if (!ok) throw DataError("score panel '" + model + "' has arrays of different lengths");
  for (const auto& q : qs)
    for (double v : q)
      if (v < 0.0) throw DataError("score panel '" + model + "' has a negative quantile score");
  for (double v : pit)
    if (!(v >= 0.0 && v <= 1.0)) throw DataError("score panel '" + model + "' has a PIT outside [0, 1]");
}

void add_score(ScorePanel& panel, Quarter date, double realized, std::span<const double> draws,
               const DrawMixtures& mixtures, RandomStream& rng) {
  if (draws.empty()) throw DataError("no predictive draws for " + date.to_string());
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  const double point = mean(draws);
  panel.dates.push_back(date);
  panel.realized.push_back(realized);
  panel.point.push_back(point);
  panel.sq_error.push_back((realized - point) * (realized - point));
  panel.lpl.push_back(log_pred_likelihood(mixtures, realized));
  panel.pit.push_back(pit_value(draws, realized, rng));
  for (std::size_t k = 0; k < panel.p_grid.size(); ++k) {
    panel.qs[k].push_back(quantile_score(realized, sorted_quantile(sorted, panel.p_grid[k]), panel.p_grid[k]));
  }
}

double mean(std::span<const double> x) {
  if (x.empty()) throw DataError("mean of an empty series");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double mse(std::span<const double> sq_errors) { return mean(sq_errors); }

void check_aligned(const ScorePanel& model, const ScorePanel& benchmark) {
  if (model.dates != benchmark.dates) {
    throw DataError("alignment: '" + model.model + "' and benchmark '" + benchmark.model +
                    "' score different outcome dates (" + std::to_string(model.size()) + " vs " +
                    std::to_string(benchmark.size()) + ")");
  }
  if (model.p_grid != benchmark.p_grid) throw DataError("alignment: quantile grids differ");
}

TableRow level_row(const ScorePanel& b) {
  TableRow r;
  r.model = b.model;
  r.benchmark = true;
  r.mse = mse(b.sq_error);
  r.lpl = mean(b.lpl);
  for (const auto& q : b.qs) r.qs.push_back(mean(q));
  return r;
}

TableRow relative_row(const ScorePanel& m, const ScorePanel& b) {
  check_aligned(m, b);
  TableRow r;
  r.model = m.model;
  r.mse = mse(m.sq_error) / mse(b.sq_error);
  r.lpl = mean(m.lpl) - mean(b.lpl);
  for (std::size_t k = 0; k < m.qs.size(); ++k) r.qs.push_back(mean(m.qs[k]) / mean(b.qs[k]));
  return r;
}

std::vector<double> cumulative_path(std::span<const double> model, std::span<const double> benchmark,
                                    bool lower_is_better) {
  if (model.size() != benchmark.size()) throw DataError("alignment: cumulative path inputs differ in length");
  std::vector<double> out(model.size());
  double run = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    run += lower_is_better ? benchmark[i] - model[i] : model[i] - benchmark[i];
    out[i] = run;
  }
  return out;
}

std::vector<Window> default_subsample_windows() {
  auto q = Quarter::from_year_quarter;
  return {{"1980-1990", q(1980, 1), q(1990, 4)},
          {"1991-2000", q(1991, 1), q(2000, 4)},
          {"2001-2010", q(2001, 1), q(2010, 4)},
          {"2011-2021", q(2011, 1), q(2021, 4)}};
}

std::vector<SubsampleRow> subsample_average(const ScorePanel& m, const ScorePanel& b, const std::vector<Window>& windows) {
  check_aligned(m, b);
  std::vector<SubsampleRow> out;
  for (const auto& w : windows) {
    SubsampleRow row;
    row.model = m.model;
    row.window = w.label;
    std::vector<double> num_sum(m.qs.size(), 0.0), den_sum(m.qs.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m.dates[i] < w.start || m.dates[i] > w.end) continue;
      ++row.count;
      for (std::size_t k = 0; k < m.qs.size(); ++k) {
        num_sum[k] += m.qs[k][i];
        den_sum[k] += b.qs[k][i];
      }
    }
    if (row.count == 0) continue;
    for (std::size_t k = 0; k < m.qs.size(); ++k) row.qs_ratio.push_back(num_sum[k] / den_sum[k]);
    out.push_back(std::move(row));
  }
  return out;
}

double kolmogorov_critical(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("kolmogorov_critical: level must lie in (0, 1)");
  return std::sqrt(-0.5 * std::log(0.5 * level));
}

double ks_uniform_pvalue(std::span<const double> pits) {
  if (pits.empty()) throw std::invalid_argument("ks_uniform_pvalue: no values");
  std::vector<double> x(pits.begin(), pits.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - x[i], x[i] - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

bool CalibrationCurve::inside() const {
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(ecdf[i] - grid[i]) > band) return false;
  return true;
}

CalibrationCurve rs_diagnostic(std::span<const double> pits, std::span<const double> grid, double level) {
  if (pits.empty()) throw std::invalid_argument("rs_diagnostic: no PIT values");
  std::vector<double> sorted(pits.begin(), pits.end());
  std::sort(sorted.begin(), sorted.end());
  CalibrationCurve c;
  c.n = static_cast<int>(sorted.size());
  c.band = kolmogorov_critical(level) / std::sqrt(static_cast<double>(c.n));
  for (double r : grid) {
    const auto below = std::upper_bound(sorted.begin(), sorted.end(), r) - sorted.begin();
    c.grid.push_back(r);
    c.ecdf.push_back(static_cast<double>(below) / static_cast<double>(c.n));
  }
  return c;
}

std::vector<double> unit_grid(int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
  return g;
}

void write_scores_csv(const ScorePanel& p, const std::filesystem::path& path) {
  p.check();
  auto out = open_out(path);
  out << "date,realized,point,sq_error,lpl,pit";
  for (double q : p.p_grid) out << ",qs_" << p_label(q);
  out << '\n';
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << p.dates[i].to_string() << ',' << num(p.realized[i]) << ',' << num(p.point[i]) << ',' << num(p.sq_error[i])
        << ',' << num(p.lpl[i]) << ',' << num(p.pit[i]);
    for (const auto& q : p.qs) out << ',' << num(q[i]);
    out << '\n';
  }
}

ScorePanel read_scores_csv(const std::filesystem::path& path, const std::string& model) {
  const auto rows = detail::read_csv(path);
  if (rows.empty() || rows[0].size() < 6) throw DataError("malformed scores file " + path.string());
  ScorePanel p;
  p.model = model;
  p.p_grid.clear();
  for (std::size_t c = 6; c < rows[0].size(); ++c) p.p_grid.push_back(std::stod(rows[0][c].substr(3)));
  p.qs.assign(p.p_grid.size(), {});
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != rows[0].size()) throw DataError("ragged row in " + path.string());
    auto val = [&](std::size_t c) {
      bool ok = false;
      const double v = detail::parse_number(row[c], &ok);
      if (!ok) throw DataError("bad number '" + row[c] + "' in " + path.string());
      return v;
    };
    p.dates.push_back(Quarter::parse(row[0]));
    p.realized.push_back(val(1));
    p.point.push_back(val(2));
    p.sq_error.push_back(val(3));
    p.lpl.push_back(val(4));
    p.pit.push_back(val(5));
    for (std::size_t k = 0; k < p.p_grid.size(); ++k) p.qs[k].push_back(val(6 + k));
  }
  return p;
}

void write_table_csv(const std::vector<TableRow>& rows, const std::vector<double>& p_grid,
                     const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "model,kind,mse,lpl";
  for (double q : p_grid) out << ",qs_" << p_label(q);
  out << '\n';
  for (const auto& r : rows) {
    out << r.model << ',';
    if (r.absent) {
      out << "absent,,";
      for (std::size_t k = 0; k < p_grid.size(); ++k) out << ',';
      out << '\n';
      continue;
    }
    out << (r.benchmark ? "level" : "relative") << ',' << detail::format_number(r.mse, 12) << ','
        << detail::format_number(r.lpl, 12);
    for (double q : r.qs) out << ',' << detail::format_number(q, 12);
    out << '\n';
  }
}

void write_cumulative_csv(const std::vector<Quarter>& dates, const std::vector<std::string>& names,
                          const std::vector<std::vector<double>>& paths, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "date";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < dates.size(); ++i) {
    out << dates[i].to_string();
    for (const auto& p : paths) out << ',' << num(p[i]);
    out << '\n';
  }
}

void write_subsamples_csv(const std::vector<SubsampleRow>& rows, const std::vector<double>& p_grid,
                          const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "model,window,count";
  for (double q : p_grid) out << ",qs_" << p_label(q);
  out << '\n';
  for (const auto& r : rows) {
    out << r.model << ',' << r.window << ',' << r.count;
    for (double q : r.qs_ratio) out << ',' << detail::format_number(q, 12);
    out << '\n';
  }
}

void write_calibration_csv(const CalibrationCurve& c, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "grid,ecdf,lower,upper\n";
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    out << num(c.grid[i]) << ',' << num(c.ecdf[i]) << ',' << num(c.grid[i] - c.band) << ',' << num(c.grid[i] + c.band)
        << '\n';
  }
}

}  // namespace bnpfc::eval
