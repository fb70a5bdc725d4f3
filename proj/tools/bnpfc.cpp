#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/core/log.hpp"
#include "bnpfc/data/regression.hpp"
#include "cli/config.hpp"
#include "cli/report.hpp"
#include "cli/runner.hpp"

namespace {

using namespace bnpfc;
using namespace bnpfc::cli;

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kConfig = 2;

struct Overrides {
  std::string out;
  int workers = 0;
  std::optional<std::uint64_t> seed;
  std::string models;
  std::string horizons;
  std::string draws_format;
  std::string dump_design;
  bool dump_traces = false;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

RunConfig configure(const std::string& path, const Overrides& o) {
  RunConfig c = load_config(path);
  if (!o.out.empty()) c.out = std::filesystem::absolute(o.out);
  if (o.workers > 0) c.workers = o.workers;
  if (o.seed) c.mcmc.seed = *o.seed;
  if (!o.models.empty()) {
    c.models.clear();
    for (const auto& id : split_list(o.models)) c.models.push_back(engine::parse_model_id(id, {}).id());
  }
  if (!o.horizons.empty()) {
    c.horizons.clear();
    for (const auto& h : split_list(o.horizons)) {
      try {
        c.horizons.push_back(std::stoi(h));
      } catch (const std::exception&) {
        throw ConfigError("--horizons: '" + h + "' is not an integer");
      }
      if (c.horizons.back() < 1) throw ConfigError("--horizons: horizons must be positive");
    }
  }
  if (o.draws_format == "csv") c.draws_format = DrawsFormat::Csv;
  else if (o.draws_format == "bin") c.draws_format = DrawsFormat::Bin;
  else if (!o.draws_format.empty()) throw ConfigError("--draws-format must be csv or bin");
  if (o.dump_traces) c.dump_traces = true;
  return c;
}

void dump_designs(const Plan& plan, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& g : plan.groups) data::write_design_csv(g.design, dir / ("design_" + g.name() + ".csv"));
}

int cmd_validate(const std::string& path, const Overrides& o) {
  const RunConfig c = configure(path, o);
  const Plan plan = plan_run(c);
  std::cout << "config ok: " << c.models.size() << " models, " << c.horizons.size() << " horizons, "
            << c.datasets.size() << " datasets\n";
  for (const auto& g : plan.groups) {
    std::cout << "  " << g.name() << ": " << g.design.rows() << " rows, " << g.design.num_predictors()
              << " predictors, " << g.origins.size() << " origins (" << g.origins.front().to_string() << " to "
              << g.origins.back().to_string() << ")\n";
  }
  std::cout << "cells: " << plan.cells.size() << "\n";
  if (!o.dump_design.empty()) dump_designs(plan, o.dump_design);
  return kOk;
}

int cmd_run(const std::string& path, const Overrides& o) {
  const RunConfig c = configure(path, o);
  const Plan plan = plan_run(c);
  if (!o.dump_design.empty()) dump_designs(plan, o.dump_design);
  log_info("running " + std::to_string(plan.cells.size()) + " cells on " + std::to_string(c.workers) + " workers into " +
           c.out.string());
  const RunSummary summary = execute(c, plan);
  write_manifest(c, plan, summary);
  const auto gaps = write_report(c, plan);
  if (std::find(c.models.begin(), c.models.end(), c.lasso_model) != c.models.end()) {
    summarize_lasso(c, plan, c.lasso_model);
  }
  std::cout << "cells: " << summary.total << " total, " << summary.skipped << " reused, " << summary.completed
            << " run, " << summary.failures.size() << " failed\n";
  for (const auto& f : summary.failures) std::cout << "  failed: " << f << "\n";
  return summary.failures.empty() && gaps.missing.empty() ? kOk : kPartial;
}

RunConfig config_from_run_dir(const std::string& dir, const Overrides& o) {
  const auto manifest = std::filesystem::path(dir) / "manifest.json";
  if (!std::filesystem::exists(manifest)) throw ConfigError("no manifest.json in " + dir);
  Overrides keep = o;
  keep.out = dir;
  return configure(manifest.string(), keep);
}

int cmd_report(const std::string& dir, const Overrides& o) {
  const RunConfig c = config_from_run_dir(dir, o);
  const Plan plan = plan_run(c);
  const auto gaps = write_report(c, plan);
  if (std::find(c.models.begin(), c.models.end(), c.lasso_model) != c.models.end()) {
    summarize_lasso(c, plan, c.lasso_model);
  }
  std::cout << "report written to " << (c.out / "report").string() << "\n";
  return gaps.missing.empty() ? kOk : kPartial;
}

int cmd_lasso(const std::string& dir, const std::string& model, const Overrides& o) {
  RunConfig c = config_from_run_dir(dir, o);
  const std::string id = model.empty() ? c.lasso_model : engine::parse_model_id(model, {}).id();
  const Plan plan = plan_run(c);
  const int n = summarize_lasso(c, plan, id);
  std::cout << "quantile-LASSO summaries for " << id << ": " << n << " of " << plan.groups.size() << " groups\n";
  return n == static_cast<int>(plan.groups.size()) ? kOk : kPartial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian nonparametric inflation forecasting: recursive MCMC forecasts, scoring and summaries"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only print warnings and errors");

  Overrides o;
  std::string config, run_dir, model;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--workers", o.workers, "Number of worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--models", o.models, "Comma-separated model ids, e.g. GP-DPMSV,UC-SV");
    sub->add_option("--horizons", o.horizons, "Comma-separated horizons");
  };

  auto* validate = app.add_subcommand("validate", "Check a config and the data, and count cells");
  validate->add_option("--config", config, "Config JSON")->required();
  validate->add_option("--dump-design", o.dump_design, "Write the assembled designs as CSV into this directory");
  add_common(validate);

  auto* run = app.add_subcommand("run", "Run (or resume) the forecast grid and write the report");
  run->add_option("--config", config, "Config JSON or a run manifest")->required();
  run->add_option("--out", o.out, "Output directory (overrides the config)");
  run->add_option("--draws-format", o.draws_format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}));
  run->add_option("--dump-design", o.dump_design, "Write the assembled designs as CSV into this directory");
  run->add_flag("--dump-traces", o.dump_traces, "Write per-cell parameter traces");
  add_common(run);

  auto* report = app.add_subcommand("report", "Rebuild tables and plot-ready CSVs from a run directory");
  report->add_option("--out", run_dir, "Run directory")->required();

  auto* lasso = app.add_subcommand("summarize-lasso", "Quantile-LASSO summaries of a model's predictive quantiles");
  lasso->add_option("--out", run_dir, "Run directory")->required();
  lasso->add_option("--model", model, "Model id (defaults to the config's lasso.model)");

  CLI11_PARSE(app, argc, argv);
  set_log_level(quiet ? LogLevel::Warning : LogLevel::Info);

  try {
    if (*validate) return cmd_validate(config, o);
    if (*run) return cmd_run(config, o);
    if (*report) return cmd_report(run_dir, o);
    if (*lasso) return cmd_lasso(run_dir, model, o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPartial;
  }
  return kOk;
}
