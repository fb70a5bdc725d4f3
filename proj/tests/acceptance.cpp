// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. The exit status is nonzero only if the
// runner itself breaks; criterion outcomes are in the printed lines and in the
// optional --results file.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "bnpfc/core/log.hpp"
#include "bnpfc/data/panel.hpp"
#include "bnpfc/engine/forecast.hpp"
#include "bnpfc/eval/scores.hpp"
#include "bnpfc/eval/tables.hpp"
#include "bnpfc/gp/kernel.hpp"
#include "bnpfc/gp/projection.hpp"
#include "bnpfc/gp/sampling.hpp"
#include "bnpfc/gp/subspace.hpp"
#include "cli/config.hpp"
#include "cli/report.hpp"
#include "cli/runner.hpp"
#include "data/csv.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

namespace {

using namespace bnpfc;
using scenario::seconds_since;
using Clock = std::chrono::steady_clock;

struct Outcome {
  std::string status;  // PASS, FAIL or SKIP
  std::string detail;
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

Outcome verdict(bool ok, const std::string& detail) { return {ok ? "PASS" : "FAIL", detail}; }

Matrix randn(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n01;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(gen);
  return m;
}

double rel_err(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

Outcome gp_conditional() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const int T = 25;
    const Matrix X = randn(T, 3, seed);
    const Matrix K = gp::kernel_from_distances(gp::squared_distances(X), {0.6, 0.3});
    const auto proj = gp::projection_matrix(X);
    const Matrix k1 = gp::subspace_kernel(K, proj, 0.5);
    const Vector sigma = (randn(T, 1, seed + 10).array().abs() + 0.1).matrix();
    const Vector r = randn(T, 1, seed + 20);
    const gp::GpConditional cond(k1, sigma, r);
    const Matrix C = oracle::inverse(Matrix(k1 + Matrix(sigma.asDiagonal())));
    worst = std::max({worst, rel_err(cond.mean(), k1 * C * r), rel_err(cond.covariance(), k1 - k1 * C * k1)});
  }
  const double secs = seconds_since(t0);
  return verdict(worst < 1e-10 && secs < 1.0, "max relative error " + fmt(worst, 3) + ", " + fmt(secs, 3) + " s");
}

Outcome subspace_endpoints() {
  const auto t0 = Clock::now();
  const int T = 25;
  const Matrix X = randn(T, 3, 70);
  const Matrix K = gp::kernel_from_distances(gp::squared_distances(X), {0.9, 0.1});
  const auto proj = gp::projection_matrix(X);
  const Vector y = randn(T, 1, 71);
  const gp::GpConditional plain(K, Vector::Constant(T, 0.2), y);
  const gp::GpConditional far(gp::subspace_kernel(K, proj, 1e8), Vector::Constant(T, 0.2), y);
  const double e_far = rel_err(far.mean(), plain.mean());
  const gp::GpConditional near(gp::subspace_kernel(K, proj, 1e-8), Vector::Constant(T, 1e-4), y);
  const double e_near = rel_err(near.mean(), proj.phi0() * y);
  const double secs = seconds_since(t0);
  return verdict(e_far < 1e-4 && e_near < 1e-3 && secs < 1.0,
                 "tau2=1e8 vs plain GP " + fmt(e_far, 3) + ", tau2=1e-8 vs projection fit " + fmt(e_near, 3) + ", " +
                     fmt(secs, 3) + " s");
}

Outcome dpm_recovery() {
  const auto r = scenario::dpm_recovery(1);
  return verdict(r.l1 < 0.1 && (r.occupied_mode == 2 || r.occupied_mode == 3) && r.seconds < 60.0,
                 "L1 " + fmt(r.l1, 3) + ", occupied-cluster mode " + std::to_string(r.occupied_mode) + ", " +
                     fmt(r.seconds, 3) + " s");
}

Outcome getting_it_right() {
  const auto g = scenario::getting_it_right(1, 10000, 20);
  const double z_alpha = (g.alpha_mean - 0.5) / g.alpha_se;
  const double z_mu = g.mu_mean / g.mu_se;
  return verdict(std::abs(z_alpha) < 3.0 && std::abs(z_mu) < 3.0 && g.seconds < 120.0,
                 "alpha z " + fmt(z_alpha, 3) + ", mu z " + fmt(z_mu, 3) + ", " + fmt(g.seconds, 3) + " s");
}

Outcome sv_recovery() {
  const auto r = scenario::sv_recovery(1, 0.95, 0.2);
  return verdict(r.rho_mean >= 0.90 && r.rho_mean < 1.0 && r.coverage >= 0.8 && r.seconds < 60.0,
                 "posterior mean rho " + fmt(r.rho_mean, 4) + ", 90% band coverage " + fmt(r.coverage, 3) + ", " +
                     fmt(r.seconds, 3) + " s");
}

Outcome tick_loss() {
  struct Case {
    double y, q, p, expected;
  };
  // Each expected value is (y - q)(p - 1{y <= q}) worked by hand.
  const Case cases[] = {{2.0, 1.0, 0.95, 0.95}, {1.0, 2.0, 0.05, 0.95}, {3.0, 3.0, 0.5, 0.0},
                        {0.5, 0.0, 0.25, 0.125}, {-1.0, 1.0, 0.75, 0.5}};
  int matched = 0;
  for (const auto& c : cases) matched += eval::quantile_score(c.y, c.q, c.p) == c.expected;
  return verdict(matched == 5, std::to_string(matched) + "/5 exact matches");
}

Outcome calibration(const std::filesystem::path& source_dir) {
  const auto panel = data::read_panel(source_dir / "data/synthetic_panel.csv", source_dir / "data/synthetic_series.csv");
  data::DatasetSpec ds;
  const auto design = data::assemble_regression(panel, ds);
  engine::McmcConfig mc;
  mc.n_iter = 1500;
  mc.n_burn = 500;
  mc.store_paths = false;
  std::vector<engine::PredictiveDraws> cells;
  for (const char* id : {"Linear-DPM", "UC-SV", "GP-SV"}) {
    const auto spec = engine::parse_model_id(id, ds);
    for (Quarter origin : {Quarter::from_year_quarter(2015, 1), Quarter::from_year_quarter(2021, 3)}) {
      cells.push_back(engine::forecast_cell(spec, design, origin, mc));
    }
  }
  RandomStream y_rng(11), draw_rng(12), pit_rng(13);
  std::vector<double> pits;
  for (int i = 0; i < 500; ++i) {
    const auto& mix = cells[static_cast<std::size_t>(i) % cells.size()].mixtures;
    const auto n = mix.draws();
    const double y = eval::simulate_draw(mix, static_cast<std::size_t>(y_rng.uniform() * n) % n, y_rng);
    std::vector<double> draws(n);
    for (std::size_t k = 0; k < n; ++k) draws[k] = eval::simulate_draw(mix, k, draw_rng);
    pits.push_back(eval::pit_value(draws, y, pit_rng));
  }
  const double p = eval::ks_uniform_pvalue(pits);
  const auto curve = eval::rs_diagnostic(pits, eval::unit_grid(), 0.05);
  double worst = 0.0;
  for (std::size_t k = 0; k < curve.grid.size(); ++k) worst = std::max(worst, std::abs(curve.ecdf[k] - curve.grid[k]));
  return verdict(p >= 0.01 && curve.inside(), "KS p-value " + fmt(p, 3) + ", max QQ deviation " + fmt(worst, 3) +
                                                  " vs band " + fmt(curve.band, 3));
}

Outcome lasso() {
  const auto r = scenario::lasso_recovery(1);
  std::string supports;
  for (const auto& s : r.supports) {
    supports += "{";
    for (std::size_t i = 0; i < s.size(); ++i) supports += (i ? "," : "") + std::to_string(s[i]);
    supports += "}";
  }
  return verdict(r.support_exact && r.min_r2 >= 0.8 && r.max_kkt_violation < 1e-8,
                 "supports " + supports + ", min R2 " + fmt(r.min_r2, 4) + ", max KKT violation " +
                     fmt(r.max_kkt_violation, 3) + " x lambda");
}

struct SmokeResult {
  Outcome efficiency;
  Outcome smoke;
};

SmokeResult end_to_end(const std::filesystem::path& source_dir, const std::filesystem::path& work_dir, int workers) {
  auto config = cli::load_config(source_dir / "config/smoke.json");
  config.out = work_dir;
  config.workers = workers;
  std::filesystem::remove_all(work_dir);
  const auto t0 = Clock::now();
  const auto plan = cli::plan_run(config);
  const auto summary = cli::execute(config, plan);
  cli::write_manifest(config, plan, summary);
  const auto gaps = cli::write_report(config, plan);
  const double secs = seconds_since(t0);

  const cli::Layout layout{work_dir};
  double worst = 0.0;
  std::string worst_name = "none";
  int monitored = 0;
  for (const auto& cell : plan.cells) {
    const auto rec = cli::read_cell_record(layout, cell.stem(plan.groups));
    if (!rec) continue;
    for (const auto& [name, v] : (*rec)["inefficiency"].items()) {
      ++monitored;
      if (v.get<double>() > worst) {
        worst = v.get<double>();
        worst_name = cell.model + " " + name + " at " + cell.origin.to_string();
      }
    }
  }
  SmokeResult out;
  out.efficiency = verdict(monitored > 0 && worst < 40.0 && summary.failures.empty(),
                           std::to_string(monitored) + " monitored traces, largest inefficiency factor " +
                               fmt(worst, 4) + " (" + worst_name + ")");

  bool exact = false;
  const auto table = bnpfc::detail::read_csv(work_dir / "report" / plan.groups[0].name() / "table1.csv");
  for (const auto& row : table) {
    if (row.size() < 4 || row[0] != config.benchmark || row[1] != "relative") continue;
    exact = row[2] == "1" && row[3] == "0";
    for (std::size_t k = 4; k < row.size(); ++k) exact = exact && row[k] == "1";
  }
  const int done = summary.completed + summary.skipped;
  out.smoke = verdict(done == summary.total && gaps.missing.empty() && secs < 600.0 && exact,
                      std::to_string(done) + "/" + std::to_string(summary.total) + " cells on " +
                          std::to_string(workers) + " workers (" + std::to_string(std::thread::hardware_concurrency()) +
                          " hardware threads) in " + fmt(secs, 4) + " s; benchmark relative row " +
                          (exact ? "exactly 1/0" : "NOT exactly 1/0"));
  return out;
}

Outcome real_data(const std::string& run_dir) {
  if (run_dir.empty()) return {"SKIP", "non-binding; pass --real-run DIR with a completed FRED-QD run to check it"};
  const auto table = bnpfc::detail::read_csv(std::filesystem::path(run_dir) / "report/Moderate_h1/table1.csv");
  std::string detail;
  bool any = false, all_below = true;
  for (const auto& row : table) {
    if (row.size() < 3 || row[0].rfind("GP-", 0) != 0 || row[1] != "relative") continue;
    any = true;
    all_below = all_below && std::stod(row[2]) < 1.0;
    detail += row[0] + " " + row[2] + "; ";
  }
  if (!any) return {"SKIP", "no GP rows in " + run_dir};
  return {all_below ? "PASS" : "FAIL", "non-binding; MSE ratios vs UC-SV: " + detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner"};
  std::string source_dir = BNPFC_SOURCE_DIR;
  std::string work_dir = "acceptance_smoke";
  std::string results;
  std::string real_run;
  int workers = 4;
  bool skip_smoke = false;
  app.add_option("--source-dir", source_dir, "Repository root (data/ and config/)");
  app.add_option("--work-dir", work_dir, "Scratch directory for the end-to-end run");
  app.add_option("--results", results, "Also write the PASS/FAIL lines to this file");
  app.add_option("--real-run", real_run, "Completed run directory on real data for the optional check");
  app.add_option("--workers", workers, "Workers for the end-to-end run");
  app.add_flag("--skip-smoke", skip_smoke, "Skip the end-to-end run (criteria 9 and 10)");
  CLI11_PARSE(app, argc, argv);
  set_log_level(LogLevel::Warning);

  std::vector<std::pair<std::string, Outcome>> lines;
  auto record = [&](const std::string& label, auto&& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {"FAIL", std::string("exception: ") + e.what()};
    }
    std::cout << o.status << "  " << label << ": " << o.detail << std::endl;
    lines.emplace_back(label, o);
  };

  record("[1] GP conditional vs dense oracle", gp_conditional);
  record("[2] subspace kernel endpoints", subspace_endpoints);
  record("[3] DPM density recovery", dpm_recovery);
  record("[4] DPM getting-it-right", getting_it_right);
  record("[5] SV recovery", sv_recovery);
  record("[6] quantile score hand cases", tick_loss);
  record("[7] PIT calibration under the model", [&] { return calibration(source_dir); });
  record("[8] quantile-LASSO support recovery", lasso);
  if (skip_smoke) {
    record("[9] sampler inefficiency factors", [] { return Outcome{"SKIP", "--skip-smoke"}; });
    record("[10] end-to-end smoke run", [] { return Outcome{"SKIP", "--skip-smoke"}; });
  } else {
    SmokeResult smoke;
    bool ran = false;
    auto run_once = [&] {
      if (!ran) smoke = end_to_end(source_dir, work_dir, workers);
      ran = true;
    };
    record("[9] sampler inefficiency factors", [&] {
      run_once();
      return smoke.efficiency;
    });
    record("[10] end-to-end smoke run", [&] {
      run_once();
      return smoke.smoke;
    });
  }
  record("[11] real-data MSE ratio (optional)", [&] { return real_data(real_run); });

  std::map<std::string, int> counts;
  for (const auto& [_, o] : lines) ++counts[o.status];
  std::cout << "acceptance: " << counts["PASS"] << " pass, " << counts["FAIL"] << " fail, " << counts["SKIP"]
            << " skip\n";
  if (!results.empty()) {
    std::ofstream out(results);
    for (const auto& [label, o] : lines) out << o.status << "  " << label << ": " << o.detail << "\n";
  }
  return 0;
}
