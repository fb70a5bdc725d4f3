#include "cli/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/core/log.hpp"
#include "bnpfc/data/panel.hpp"
#include "bnpfc/engine/forecast.hpp"
#include "bnpfc/eval/tables.hpp"

namespace bnpfc::cli {

using nlohmann::json;

namespace {

void write_atomically(const std::filesystem::path& path, const std::string& content, bool binary = false) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, binary ? std::ios::binary : std::ios::out);
    if (!out) throw DataError("cannot write " + tmp);
    out << content;
    if (!out) throw DataError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string draws_extension(DrawsFormat f) { return f == DrawsFormat::Csv ? ".csv" : ".bin"; }

json run_cell(const RunConfig& config, const Plan& plan, const Cell& cell, const Layout& layout) {
  const auto t0 = std::chrono::steady_clock::now();
  const Group& g = plan.groups[cell.group];
  const std::string stem = cell.stem(plan.groups);
  const auto spec = config.model_spec(cell.model, g.dataset, g.horizon);
  engine::PosteriorDraws posterior;
  const auto pd = engine::forecast_cell(spec, g.design, cell.origin, config.mcmc, &posterior);

  eval::ScorePanel score;
  score.model = cell.model;
  RandomStream pit_rng(derive_seed(pd.seed, "pit"));
  eval::add_score(score, pd.target_date, pd.realized, pd.draws, pd.mixtures, pit_rng);

  const auto draws_name = stem + draws_extension(config.draws_format);
  write_draws(pd.draws, layout.draws_dir() / draws_name, config.draws_format);
  if (config.dump_traces) engine::write_traces_csv(posterior, layout.traces_dir() / (stem + ".csv"));

  json qs = json::array();
  for (const auto& q : score.qs) qs.push_back(q[0]);
  json ifs = json::object();
  for (const auto& [name, v] : posterior.inefficiency) ifs[name] = v;
  json rec{{"model", cell.model},
           {"dataset", data::to_string(g.dataset)},
           {"horizon", g.horizon},
           {"origin", cell.origin.to_string()},
           {"target_date", pd.target_date.to_string()},
           {"realized", pd.realized},
           {"seed", pd.seed},
           {"draws_file", "draws/" + draws_name},
           {"n_draws", pd.draws.size()},
           {"point", score.point[0]},
           {"p_grid", pd.p_grid},
           {"quantiles", pd.quantiles},
           {"sq_error", score.sq_error[0]},
           {"lpl", score.lpl[0]},
           {"pit", score.pit[0]},
           {"qs", qs},
           {"inefficiency", ifs},
           {"hyper_acceptance", posterior.hyper_acceptance},
           {"alpha_acceptance", posterior.alpha_acceptance},
           {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  write_atomically(layout.cells_dir() / (stem + ".json"), rec.dump(1) + "\n");
  return rec;
}

}  // namespace

std::string Group::name() const { return data::to_string(dataset) + "_h" + std::to_string(horizon); }

std::string Cell::stem(const std::vector<Group>& groups) const {
  const Group& g = groups[group];
  return model + "_" + data::to_string(g.dataset) + "_" + std::to_string(g.horizon) + "_" + origin.to_string();
}

Plan plan_run(const RunConfig& config) {
  for (const auto& p : {config.panel, config.series_info}) {
    if (!std::filesystem::exists(p)) throw DataError("data file not found: " + p.string());
  }
  const data::SeriesPanel panel = data::read_panel(config.panel, config.series_info);
  Plan plan;
  for (auto variant : config.datasets) {
    for (int h : config.horizons) {
      Group g;
      g.dataset = variant;
      g.horizon = h;
      g.design = data::assemble_regression(panel, config.dataset_spec(variant, h));
      const Quarter first = g.design.target_date(0);
      const Quarter last = g.design.target_date(g.design.rows() - 1);
      if (config.eval_start < first || config.eval_end > last) {
        throw ConfigError("evaluation window " + config.eval_start.to_string() + " to " + config.eval_end.to_string() +
                          " lies outside the " + g.name() + " outcome span " + first.to_string() + " to " +
                          last.to_string());
      }
      g.origins = engine::forecast_origins(g.design, config.eval_start, config.eval_end, config.min_train);
      if (config.max_origins > 0 && static_cast<int>(g.origins.size()) > config.max_origins) {
        g.origins.resize(static_cast<std::size_t>(config.max_origins));
      }
      if (g.origins.empty()) throw ConfigError("no forecast origins for " + g.name() + " in the evaluation window");
      plan.groups.push_back(std::move(g));
    }
  }
  for (std::size_t gi = 0; gi < plan.groups.size(); ++gi)
    for (const auto& model : config.models)
      for (Quarter origin : plan.groups[gi].origins) plan.cells.push_back({model, gi, origin});
  return plan;
}

std::optional<json> read_cell_record(const Layout& layout, const std::string& stem) {
  const auto path = layout.cells_dir() / (stem + ".json");
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error&) {
    log_warning("unreadable cell record " + path.string() + "; the cell will be rerun");
    return std::nullopt;
  }
}

RunSummary execute(const RunConfig& config, const Plan& plan) {
  const Layout layout{config.out};
  for (const auto& d : {layout.draws_dir(), layout.cells_dir(), layout.report_dir()}) std::filesystem::create_directories(d);
  if (config.dump_traces) std::filesystem::create_directories(layout.traces_dir());

  RunSummary summary;
  summary.total = static_cast<int>(plan.cells.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < plan.cells.size(); ++i) {
    if (read_cell_record(layout, plan.cells[i].stem(plan.groups))) ++summary.skipped;
    else todo.push_back(i);
  }
  if (summary.skipped > 0) {
    log_info(std::to_string(summary.skipped) + " of " + std::to_string(summary.total) + " cells already complete");
  }

  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::vector<std::pair<std::size_t, std::string>> failures;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= todo.size()) return;
      const Cell& cell = plan.cells[todo[k]];
      const std::string stem = cell.stem(plan.groups);
      try {
        const json rec = run_cell(config, plan, cell, layout);
        std::lock_guard lock(mutex);
        ++summary.completed;
        log_info("[" + std::to_string(summary.completed + static_cast<int>(failures.size())) + "/" +
                 std::to_string(todo.size()) + "] " + stem + " (" +
                 std::to_string(static_cast<int>(rec["seconds"].get<double>() + 0.5)) + " s)");
      } catch (const std::exception& e) {
        std::lock_guard lock(mutex);
        failures.emplace_back(todo[k], stem + ": " + e.what());
        log_warning("cell " + stem + " failed: " + e.what());
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(config.workers, static_cast<int>(todo.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::sort(failures.begin(), failures.end());
  for (auto& f : failures) summary.failures.push_back(std::move(f.second));
  return summary;
}

void write_manifest(const RunConfig& config, const Plan& plan, const RunSummary& summary) {
  const Layout layout{config.out};
  json cells = json::array();
  for (const auto& cell : plan.cells) {
    const auto stem = cell.stem(plan.groups);
    const auto rec = read_cell_record(layout, stem);
    json entry{{"cell", stem}, {"model", cell.model}, {"origin", cell.origin.to_string()}};
    entry["group"] = plan.groups[cell.group].name();
    if (rec) {
      entry["status"] = "complete";
      entry["seed"] = (*rec)["seed"];
      entry["draws_file"] = (*rec)["draws_file"];
    } else {
      entry["status"] = "missing";
    }
    cells.push_back(std::move(entry));
  }
  json doc{{"tool", "bnpfc"}, {"version", "0.1.0"}, {"config", to_json(config)}, {"cells", cells},
           {"failures", summary.failures}};
  write_atomically(layout.manifest(), doc.dump(2) + "\n");
}

void write_draws(const std::vector<double>& draws, const std::filesystem::path& path, DrawsFormat format) {
  std::string buf;
  if (format == DrawsFormat::Csv) {
    buf = "draw\n";
    char tmp[40];
    for (double d : draws) {
      std::snprintf(tmp, sizeof(tmp), "%.17g\n", d);
      buf += tmp;
    }
  } else {
    static_assert(sizeof(double) == 8);
    const std::uint64_t n = draws.size();
    buf.resize(8 + 8 * draws.size());
    std::memcpy(buf.data(), &n, 8);
    if (n) std::memcpy(buf.data() + 8, draws.data(), 8 * draws.size());
  }
  write_atomically(path, buf, format == DrawsFormat::Bin);
}

std::vector<double> read_draws(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<double> out;
  if (path.extension() == ".bin") {
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    out.resize(n);
    in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(8 * n));
    if (!in) throw DataError("truncated draws file " + path.string());
    return out;
  }
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(std::stod(line));
  }
  return out;
}

}  // namespace bnpfc::cli
