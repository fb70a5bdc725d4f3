#include "cli/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/core/log.hpp"
#include "bnpfc/eval/tables.hpp"
#include "bnpfc/summary/lasso.hpp"

namespace bnpfc::cli {

using nlohmann::json;

namespace {

struct GroupScores {
  std::map<std::string, eval::ScorePanel> panels;
  std::map<std::string, std::vector<json>> records;
};

GroupScores collect(const RunConfig& config, const Plan& plan, std::size_t gi, ReportGaps& gaps) {
  const Layout layout{config.out};
  const Group& g = plan.groups[gi];
  GroupScores out;
  for (const auto& model : config.models) {
    eval::ScorePanel panel;
    panel.model = model;
    std::vector<json> recs;
    for (Quarter origin : g.origins) {
      const Cell cell{model, gi, origin};
      const auto rec = read_cell_record(layout, cell.stem(plan.groups));
      if (!rec) {
        gaps.missing.push_back(g.name() + ": " + cell.stem(plan.groups));
        continue;
      }
      panel.dates.push_back(Quarter::parse((*rec)["target_date"].get<std::string>()));
      panel.realized.push_back((*rec)["realized"].get<double>());
      panel.point.push_back((*rec)["point"].get<double>());
      panel.sq_error.push_back((*rec)["sq_error"].get<double>());
      panel.lpl.push_back((*rec)["lpl"].get<double>());
      panel.pit.push_back((*rec)["pit"].get<double>());
      const auto qs = (*rec)["qs"].get<std::vector<double>>();
      if (qs.size() != panel.p_grid.size()) throw DataError("cell record " + cell.stem(plan.groups) + " has a bad QS grid");
      for (std::size_t k = 0; k < qs.size(); ++k) panel.qs[k].push_back(qs[k]);
      recs.push_back(*rec);
    }
    if (panel.size() == 0) continue;
    out.panels.emplace(model, std::move(panel));
    out.records.emplace(model, std::move(recs));
  }
  return out;
}

eval::ScorePanel restrict_to(const eval::ScorePanel& p, const std::vector<Quarter>& dates) {
  eval::ScorePanel out;
  out.model = p.model;
  out.p_grid = p.p_grid;
  out.qs.assign(p.p_grid.size(), {});
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::binary_search(dates.begin(), dates.end(), p.dates[i])) continue;
    out.dates.push_back(p.dates[i]);
    out.realized.push_back(p.realized[i]);
    out.point.push_back(p.point[i]);
    out.sq_error.push_back(p.sq_error[i]);
    out.lpl.push_back(p.lpl[i]);
    out.pit.push_back(p.pit[i]);
    for (std::size_t k = 0; k < p.qs.size(); ++k) out.qs[k].push_back(p.qs[k][i]);
  }
  return out;
}

std::vector<Quarter> common_dates(const eval::ScorePanel& a, const eval::ScorePanel& b) {
  std::vector<Quarter> out;
  std::set_intersection(a.dates.begin(), a.dates.end(), b.dates.begin(), b.dates.end(), std::back_inserter(out));
  return out;
}

void write_efficiency(const GroupScores& scores, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "model,trace,origins,max_inefficiency,mean_inefficiency\n";
  for (const auto& [model, recs] : scores.records) {
    std::map<std::string, std::vector<double>> by_trace;
    for (const auto& r : recs)
      for (const auto& [name, v] : r["inefficiency"].items()) by_trace[name].push_back(v.get<double>());
    for (const auto& [name, v] : by_trace) {
      double mx = 0.0, sum = 0.0;
      for (double x : v) {
        mx = std::max(mx, x);
        sum += x;
      }
      out << model << ',' << name << ',' << v.size() << ',' << mx << ',' << sum / static_cast<double>(v.size()) << '\n';
    }
  }
}

std::string p_tag(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", p);
  return buf;
}

}  // namespace

ReportGaps write_report(const RunConfig& config, const Plan& plan) {
  ReportGaps gaps;
  const Layout layout{config.out};
  for (std::size_t gi = 0; gi < plan.groups.size(); ++gi) {
    const Group& g = plan.groups[gi];
    const auto dir = layout.report_dir() / g.name();
    std::filesystem::create_directories(dir);
    const GroupScores scores = collect(config, plan, gi, gaps);
    const auto& p_grid = eval::kQuantileGrid;

    for (const auto& [model, panel] : scores.panels) {
      eval::write_scores_csv(panel, dir / ("scores_" + model + ".csv"));
      eval::write_calibration_csv(eval::rs_diagnostic(panel.pit, eval::unit_grid()), dir / ("calibration_" + model + ".csv"));
    }
    write_efficiency(scores, dir / "efficiency.csv");

    const auto bench_it = scores.panels.find(config.benchmark);
    std::vector<eval::TableRow> rows;
    if (bench_it == scores.panels.end()) {
      log_warning(g.name() + ": benchmark " + config.benchmark + " has no scores; the table reports levels only");
      for (const auto& model : config.models) {
        const auto it = scores.panels.find(model);
        eval::TableRow r;
        if (it == scores.panels.end()) {
          r.model = model;
          r.absent = true;
        } else {
          r = eval::level_row(it->second);
          r.benchmark = false;
        }
        rows.push_back(r);
      }
      eval::write_table_csv(rows, p_grid, dir / "table1.csv");
      continue;
    }

    const eval::ScorePanel& bench = bench_it->second;
    rows.push_back(eval::level_row(bench));
    const bool others = scores.panels.size() > 1;
    if (others) rows.push_back(eval::relative_row(bench, bench));

    std::vector<std::string> path_names;
    std::vector<eval::ScorePanel> full_models;
    std::vector<eval::SubsampleRow> sub_rows;
    for (const auto& model : config.models) {
      if (model == config.benchmark) continue;
      const auto it = scores.panels.find(model);
      if (it == scores.panels.end()) {
        eval::TableRow r;
        r.model = model;
        r.absent = true;
        rows.push_back(r);
        continue;
      }
      const auto dates = common_dates(it->second, bench);
      if (dates.empty()) {
        eval::TableRow r;
        r.model = model;
        r.absent = true;
        rows.push_back(r);
        continue;
      }
      const auto m = restrict_to(it->second, dates);
      const auto b = restrict_to(bench, dates);
      rows.push_back(eval::relative_row(m, b));
      auto sub = eval::subsample_average(m, b, eval::default_subsample_windows());
      sub_rows.insert(sub_rows.end(), sub.begin(), sub.end());
      if (m.size() == bench.size()) {
        path_names.push_back(model);
        full_models.push_back(m);
      } else {
        log_warning(g.name() + ": " + model + " scores " + std::to_string(m.size()) + " of " +
                    std::to_string(bench.size()) + " origins; left out of the cumulative paths");
      }
    }
    if (others) {
      auto self = eval::subsample_average(bench, bench, eval::default_subsample_windows());
      for (const auto& w : eval::default_subsample_windows()) {
        if (std::none_of(self.begin(), self.end(), [&](const eval::SubsampleRow& r) { return r.window == w.label; }))
          log_warning(g.name() + ": subsample window " + w.label + " has no scored origins; omitted");
      }
      sub_rows.insert(sub_rows.begin(), self.begin(), self.end());
    }
    eval::write_table_csv(rows, p_grid, dir / "table1.csv");
    if (!others) continue;
    eval::write_subsamples_csv(sub_rows, p_grid, dir / "qs_subsamples.csv");

    auto write_paths = [&](const std::string& metric, auto member, std::size_t k, bool lower_is_better) {
      std::vector<std::vector<double>> paths;
      for (const auto& m : full_models) paths.push_back(eval::cumulative_path(member(m, k), member(bench, k), lower_is_better));
      eval::write_cumulative_csv(bench.dates, path_names, paths, dir / ("cumulative_" + metric + ".csv"));
    };
    write_paths("lpl", [](const eval::ScorePanel& p, std::size_t) -> const std::vector<double>& { return p.lpl; }, 0, false);
    write_paths("sq_error", [](const eval::ScorePanel& p, std::size_t) -> const std::vector<double>& { return p.sq_error; },
                0, true);
    for (std::size_t k = 0; k < p_grid.size(); ++k) {
      write_paths("qs_" + p_tag(p_grid[k]),
                  [](const eval::ScorePanel& p, std::size_t kk) -> const std::vector<double>& { return p.qs[kk]; }, k, true);
    }
  }

  if (!gaps.missing.empty()) {
    std::ofstream out(layout.report_dir() / "gaps.csv");
    out << "missing_cell\n";
    for (const auto& m : gaps.missing) out << m << '\n';
    log_warning("report is partial: " + std::to_string(gaps.missing.size()) + " cells missing (see report/gaps.csv)");
  } else {
    std::filesystem::remove(layout.report_dir() / "gaps.csv");
  }
  return gaps;
}

int summarize_lasso(const RunConfig& config, const Plan& plan, const std::string& model) {
  const Layout layout{config.out};
  int done = 0;
  for (std::size_t gi = 0; gi < plan.groups.size(); ++gi) {
    const Group& g = plan.groups[gi];
    std::vector<json> recs;
    for (Quarter origin : g.origins) {
      if (auto rec = read_cell_record(layout, Cell{model, gi, origin}.stem(plan.groups))) recs.push_back(*rec);
    }
    if (static_cast<int>(recs.size()) < 2 * config.lasso_folds) {
      log_warning(g.name() + ": " + std::to_string(recs.size()) + " completed origins for " + model +
                  " are too few for the quantile-LASSO summary; skipped");
      continue;
    }
    summary::QuantilePathSet paths;
    paths.p_grid = recs.front()["p_grid"].get<std::vector<double>>();
    paths.Q.resize(static_cast<Eigen::Index>(recs.size()), static_cast<Eigen::Index>(paths.p_grid.size()));
    Matrix X(static_cast<Eigen::Index>(recs.size()), g.design.num_predictors());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const Quarter origin = Quarter::parse(recs[i]["origin"].get<std::string>());
      paths.dates.push_back(origin);
      const auto q = recs[i]["quantiles"].get<std::vector<double>>();
      for (std::size_t k = 0; k < q.size(); ++k) paths.Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = q[k];
      const auto row = data::find_origin(g.design, origin);
      if (!row) throw DataError("origin " + origin.to_string() + " missing from the design");
      X.row(static_cast<Eigen::Index>(i)) = g.design.X.row(*row);
    }
    const auto fits = summary::summarize_paths(paths, X, config.lasso_folds);
    const auto dir = layout.report_dir() / g.name();
    std::filesystem::create_directories(dir);
    const auto h = std::to_string(g.horizon);
    summary::write_lasso_csv(summary::heatmap_data(fits, g.design.columns), dir / ("lasso_" + h + ".csv"));
    summary::write_r2_csv(fits, dir / ("r2_" + h + ".csv"));
    ++done;
  }
  return done;
}

}  // namespace bnpfc::cli
