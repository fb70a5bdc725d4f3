#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/core/log.hpp"
#include "bnpfc/core/random.hpp"
#include "bnpfc/data/panel.hpp"
#include "cli/config.hpp"
#include "cli/report.hpp"
#include "cli/runner.hpp"

using namespace bnpfc;
using namespace bnpfc::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("bnpfc_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small panel: a price index with AR inflation and two predictors.
void write_small_panel(const fs::path& dir, int T = 70) {
  data::SeriesPanel p;
  RandomStream rng(5);
  for (int t = 0; t < T; ++t) p.dates.push_back(Quarter::from_year_quarter(2000, 1) + t);
  p.names = {"CPIAUCSL", "A", "B"};
  p.tcodes = {6, 1, 5};
  p.moderate = {true, true, true};
  p.large = {true, true, true};
  p.values.resize(T, 3);
  double level = 100.0, infl = 2.0, b = 50.0;
  for (int t = 0; t < T; ++t) {
    const double a = rng.normal();
    infl = 2.0 + 0.5 * (infl - 2.0) + 0.3 * a + 0.5 * rng.normal();
    level *= std::exp(infl / 400.0);
    b *= std::exp(0.01 * rng.normal());
    p.values(t, 0) = level;
    p.values(t, 1) = a;
    p.values(t, 2) = b;
  }
  data::write_panel(p, dir / "panel.csv", dir / "series.csv");
}

json small_config(const fs::path& dir) {
  return json{{"data", {{"panel", "panel.csv"}, {"series", "series.csv"}}},
              {"models", {"UC-Homosk", "Linear-Homosk"}},
              {"horizons", {1}},
              {"benchmark", "UC-Homosk"},
              {"evaluation", {{"start", "2016Q3"}, {"end", "2017Q2"}, {"min_train", 20}}},
              {"mcmc", {{"n_iter", 60}, {"n_burn", 30}, {"seed", 3}}},
              {"output", (dir / "run").string()},
              {"lasso", {{"model", "Linear-Homosk"}, {"folds", 2}}}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunSummary run_all(const RunConfig& c) {
  const auto plan = plan_run(c);
  auto summary = execute(c, plan);
  write_manifest(c, plan, summary);
  write_report(c, plan);
  return summary;
}

std::string config_error(const json& doc) {
  try {
    parse_config(doc, fs::temp_directory_path());
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing reports field paths") {
  set_log_level(LogLevel::Quiet);
  const auto dir = scratch("parse");
  json doc = small_config(dir);
  CHECK(config_error(doc).empty());

  json bad = doc;
  bad["mcmc"]["n_iter"] = "many";
  CHECK(config_error(bad).find("mcmc.n_iter") != std::string::npos);
  bad = doc;
  bad["mcmc"]["bogus"] = 1;
  CHECK(config_error(bad).find("mcmc.bogus") != std::string::npos);
  bad = doc;
  bad["models"] = {"GP-Nope"};
  CHECK(config_error(bad).find("models") != std::string::npos);
  bad = doc;
  bad["mcmc"]["n_burn"] = 60;
  CHECK(config_error(bad).find("mcmc") != std::string::npos);
  bad = doc;
  bad.erase("data");
  CHECK(config_error(bad).find("data") != std::string::npos);

  json all = doc;
  all["models"] = "all";
  const auto c = parse_config(all, dir);
  CHECK(c.models.size() == 16);
  CHECK(c.panel == dir / "panel.csv");
}

TEST_CASE("grid arithmetic, checkpointing and determinism") {
  set_log_level(LogLevel::Quiet);
  const auto dir = scratch("grid");
  write_small_panel(dir);
  RunConfig c = parse_config(small_config(dir), dir);

  const auto plan = plan_run(c);
  REQUIRE(plan.groups.size() == 1);
  CHECK(plan.groups[0].origins.size() == 4);
  CHECK(plan.cells.size() == 8);

  const auto first = run_all(c);
  CHECK(first.completed == 8);
  CHECK(first.failures.empty());
  int draw_files = 0;
  for (const auto& e : fs::directory_iterator(dir / "run/draws")) draw_files += e.path().extension() == ".csv";
  CHECK(draw_files == 8);
  CHECK(fs::exists(dir / "run/draws/Linear-Homosk_Moderate_1_2016Q2.csv"));
  const auto table = slurp(dir / "run/report/Moderate_h1/table1.csv");
  const auto scores = slurp(dir / "run/report/Moderate_h1/scores_Linear-Homosk.csv");

  SUBCASE("a rerun after an interruption only runs the missing cell") {
    fs::remove(dir / "run/cells/UC-Homosk_Moderate_1_2016Q4.json");
    const auto again = run_all(c);
    CHECK(again.skipped == 7);
    CHECK(again.completed == 1);
    CHECK(slurp(dir / "run/report/Moderate_h1/table1.csv") == table);
  }
  SUBCASE("same config and seed give byte-identical score tables on any worker count") {
    RunConfig d = c;
    d.out = dir / "run2";
    d.workers = 3;
    run_all(d);
    CHECK(slurp(dir / "run2/report/Moderate_h1/table1.csv") == table);
    CHECK(slurp(dir / "run2/report/Moderate_h1/scores_Linear-Homosk.csv") == scores);
  }
  SUBCASE("the manifest reproduces the run") {
    RunConfig m = load_config(dir / "run/manifest.json");
    CHECK(to_json(m) == to_json(c));
    m.out = dir / "run3";
    run_all(m);
    CHECK(slurp(dir / "run3/report/Moderate_h1/table1.csv") == table);
  }
  SUBCASE("benchmark rows are exact") {
    std::istringstream in(table);
    std::string line;
    std::getline(in, line);
    CHECK(line == "model,kind,mse,lpl,qs_0.05,qs_0.1,qs_0.5,qs_0.9,qs_0.95");
    std::getline(in, line);
    CHECK(line.rfind("UC-Homosk,level,", 0) == 0);
    std::getline(in, line);
    CHECK(line == "UC-Homosk,relative,1,0,1,1,1,1,1");
  }
}

TEST_CASE("report edge cases") {
  set_log_level(LogLevel::Quiet);
  const auto dir = scratch("report");
  write_small_panel(dir);
  json doc = small_config(dir);

  SUBCASE("benchmark-only run reports levels without ratios") {
    doc["models"] = {"UC-Homosk"};
    const RunConfig c = parse_config(doc, dir);
    run_all(c);
    std::ifstream in(dir / "run/report/Moderate_h1/table1.csv");
    std::string header, row, extra;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(row.rfind("UC-Homosk,level,", 0) == 0);
    CHECK_FALSE(std::getline(in, extra));
    CHECK_FALSE(fs::exists(dir / "run/report/Moderate_h1/qs_subsamples.csv"));
  }
  SUBCASE("a model with no completed cells is marked absent") {
    doc["models"] = {"UC-Homosk"};
    run_all(parse_config(doc, dir));
    doc["models"] = {"UC-Homosk", "Linear-Homosk"};
    const RunConfig c = parse_config(doc, dir);
    const auto plan = plan_run(c);
    const auto gaps = write_report(c, plan);
    CHECK(gaps.missing.size() == 4);
    const auto table = slurp(dir / "run/report/Moderate_h1/table1.csv");
    CHECK(table.find("Linear-Homosk,absent") != std::string::npos);
    CHECK(fs::exists(dir / "run/report/gaps.csv"));
  }
  SUBCASE("evaluation window outside the data span is a configuration error") {
    doc["evaluation"]["end"] = "2030Q1";
    CHECK_THROWS_AS(plan_run(parse_config(doc, dir)), ConfigError);
  }
  SUBCASE("missing data files are reported with their path") {
    doc["data"]["panel"] = "nope.csv";
    try {
      plan_run(parse_config(doc, dir));
      FAIL("expected a DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("nope.csv") != std::string::npos);
    }
  }
}

TEST_CASE("draw files round-trip in both formats") {
  const auto dir = scratch("draws");
  const std::vector<double> draws{1.5, -2.25, 1e-300, 3.141592653589793};
  write_draws(draws, dir / "d.csv", DrawsFormat::Csv);
  write_draws(draws, dir / "d.bin", DrawsFormat::Bin);
  CHECK(read_draws(dir / "d.csv") == draws);
  CHECK(read_draws(dir / "d.bin") == draws);
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch("exit");
  write_small_panel(dir);
  json doc = small_config(dir);
  auto run_tool = [&](const json& cfg, const std::string& args) {
    std::ofstream(dir / "config.json") << cfg.dump();
    const std::string cmd = std::string(BNPFC_TOOL) + " -q " + args + " --config " + (dir / "config.json").string() +
                            " > " + (dir / "out.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run_tool(doc, "validate") == 0);
  CHECK(slurp(dir / "out.txt").find("cells: 8") != std::string::npos);

  json missing = doc;
  missing["data"]["series"] = "absent.csv";
  CHECK(run_tool(missing, "validate") == 2);
  CHECK(slurp(dir / "out.txt").find("absent.csv") != std::string::npos);

  json window = doc;
  window["evaluation"]["start"] = "1990Q1";
  CHECK(run_tool(window, "validate") == 2);
  CHECK(slurp(dir / "out.txt").find("1990Q1") != std::string::npos);

  json schema = doc;
  schema["workers"] = "four";
  CHECK(run_tool(schema, "validate") == 2);
  CHECK(slurp(dir / "out.txt").find("workers") != std::string::npos);

  CHECK(run_tool(doc, "run --draws-format bin") == 0);
  CHECK(fs::exists(dir / "run/draws/UC-Homosk_Moderate_1_2016Q2.bin"));
}
