#include "bnpfc/engine/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/core/log.hpp"
#include "bnpfc/engine/diagnostics.hpp"
#include "bnpfc/gp/predict.hpp"

namespace bnpfc::engine {

namespace em = errmodel;

namespace {

struct Recorder {
  const ModelSpec& spec;
  const ChainData& data;
  const McmcConfig& config;
  PosteriorDraws& out;
  RandomStream& pred_rng;
  int column = 0;

  void push(const char* name, double v) { out.traces[name].push_back(v); }
  void extra(const char* name, double v) { out.extras[name].push_back(v); }

  void record(const ChainState& s) {
    const auto& e = s.error;
    const bool flat = spec.mean == MeanKind::Linear && spec.priors.linear == LinearPrior::Flat;
    if (s.gp && !flat) {
      push("xi", s.gp->hyper.xi);
      push("phi", s.gp->hyper.phi);
      if (spec.mean == MeanKind::GPSub) push("tau2", s.gp->tau2);
    } else if (s.trend) {
      push("trend_var", s.trend->var);
    }
    if (e.kind == em::ErrorKind::Homosk) push("sigma2", e.sigma2);
    if (e.dpm) {
      push("alpha", e.dpm->alpha);
      extra("J", e.dpm->num_components());
      extra("occupied", e.dpm->occupied());
    }
    if (e.sv) {
      push("sv_mu", e.sv->mu);
      push("sv_rho", e.sv->rho);
      push("sv_sigma2", e.sv->sigma2);
      std::vector<double> h(e.sv->h.data(), e.sv->h.data() + e.sv->h.size());
      const auto q = eval::sample_quantiles(std::move(h), std::vector<double>{0.05, 0.5, 0.95});
      extra("h_q05", q[0]);
      extra("h_q50", q[1]);
      extra("h_q95", q[2]);
    }
    if (config.store_paths) {
      out.fit_paths.col(column) = s.fit();
      if (e.sv) out.log_vol_paths.col(column) = e.sv->h;
    }
    ++column;
    predictive(s);
  }

  void predictive(const ChainState& s) {
    double mean = 0.0, var = 0.0;
    if (s.trend) {
      mean = s.trend->path(s.trend->path.size() - 1);
      var = data.horizon * s.trend->var;
    } else if (data.x_new) {
      const auto& g = *s.gp;
      if (spec.mean == MeanKind::Linear) {
        mean = gp::linear_predict(*data.proj, g.coef, *data.x_new);
      } else {
        const double tau2 = spec.mean == MeanKind::GPSub ? g.tau2 : gp::kPlainGp;
        const auto p = gp::GpPredictor(data.X, data.sqdist, *data.proj, g.hyper).predict(g.f, tau2, *data.x_new);
        mean = p.mean;
        var = p.variance;
      }
    } else {
      return;
    }
    push("fit_new", mean);
    for (const auto& c : em::error_predictive_components(s.error, data.horizon, pred_rng)) {
      out.predictive.add_component(c.weight, data.y_offset + mean + c.offset, var + c.variance);
    }
    out.predictive.close_draw();
  }
};

}  // namespace

PosteriorDraws run_chain(const ModelSpec& spec, const ChainData& data, const McmcConfig& config) {
  config.validate();
  const Eigen::Index T = data.rows();
  RandomStream rng(config.seed);
  RandomStream pred_rng(derive_seed(config.seed, "predictive"));

  PosteriorDraws out;
  out.retained = config.retained();
  if (config.store_paths) {
    out.fit_paths.resize(T, out.retained);
    if (spec.error == em::ErrorKind::Sv || spec.error == em::ErrorKind::DpmSv) out.log_vol_paths.resize(T, out.retained);
  }
  Recorder rec{spec, data, config, out, pred_rng};

  ChainState state = init_chain(spec, data, config);
  for (int it = 0; it < config.n_iter; ++it) {
    const bool adapting = config.adapt && it < config.n_burn;
    if (state.error.dpm) state.error.dpm->alpha_step.adapting = adapting;
    try {
      mcmc_step(spec, data, state, rng, adapting);
      check_chain_state(spec, state, T);
    } catch (const NumericalError& e) {
      throw NumericalError(spec.id() + " iteration " + std::to_string(it) + ": " + e.what());
    }
    if (it >= config.n_burn && (it - config.n_burn + 1) % config.thin == 0 && rec.column < out.retained) {
      rec.record(state);
    }
  }

  if (out.retained >= 100) {
    for (const auto& [name, trace] : out.traces) out.inefficiency[name] = inefficiency_factor(trace);
  }
  if (state.gp) out.hyper_acceptance = state.gp->step.acceptance_rate();
  if (state.error.dpm) out.alpha_acceptance = state.error.dpm->alpha_step.acceptance_rate();
  return out;
}

void write_traces_csv(const PosteriorDraws& draws, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  std::vector<const std::vector<double>*> cols;
  bool first = true;
  for (const auto* m : {&draws.traces, &draws.extras}) {
    for (const auto& [name, v] : *m) {
      out << (first ? "" : ",") << name;
      first = false;
      cols.push_back(&v);
    }
  }
  out << '\n';
  out.precision(17);
  for (int i = 0; i < draws.retained; ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ',';
      if (static_cast<std::size_t>(i) < cols[c]->size()) out << (*cols[c])[static_cast<std::size_t>(i)];
    }
    out << '\n';
  }
}

PredictiveDraws predictive_simulate(const ModelSpec& spec, const PosteriorDraws& draws, RandomStream& rng) {
  PredictiveDraws p;
  p.model = spec.id();
  p.horizon = spec.horizon();
  const std::size_t n = draws.predictive.draws();
  if (n == 0) throw DataError("no predictive inputs were recorded (missing forecast row)");
  p.draws.reserve(n);
  for (std::size_t i = 0; i < n; ++i) p.draws.push_back(eval::simulate_draw(draws.predictive, i, rng));
  double sum = 0.0;
  for (double d : p.draws) sum += d;
  p.point = sum / static_cast<double>(n);
  p.quantiles = eval::sample_quantiles(p.draws, p.p_grid);
  p.mixtures = draws.predictive;
  return p;
}

std::vector<Quarter> forecast_origins(const data::RegressionData& full, Quarter eval_start, Quarter eval_end,
                                      int min_train) {
  std::vector<Quarter> out;
  for (Eigen::Index t = 0; t < full.rows(); ++t) {
    const Quarter origin = full.origin_dates[static_cast<std::size_t>(t)];
    const Quarter target = full.target_date(t);
    if (target < eval_start || target > eval_end) continue;
    Eigen::Index n_train = 0;
    while (n_train < full.rows() && full.target_date(n_train) <= origin) ++n_train;
    if (n_train < min_train) {
      log_warning("skipping origin " + origin.to_string() + ": " + std::to_string(n_train) +
                  " training rows, fewer than " + std::to_string(min_train));
      continue;
    }
    out.push_back(origin);
  }
  return out;
}

std::uint64_t cell_seed(std::uint64_t master, const ModelSpec& spec, Quarter origin) {
  return derive_seed(master, spec.id() + "|" + data::to_string(spec.dataset.variant) + "|h" +
                                 std::to_string(spec.horizon()) + "|" + origin.to_string());
}

PredictiveDraws forecast_cell(const ModelSpec& spec, const data::RegressionData& full, Quarter origin,
                              McmcConfig config, PosteriorDraws* keep) {
  if (full.horizon != spec.horizon()) throw DataError("design horizon does not match the model horizon");
  const data::ForecastWindow w = data::make_window(full, origin);
  const ChainData cd = make_chain_data(spec, w.train.y, w.train.X, w.x_new);
  config.seed = cell_seed(config.seed, spec, origin);
  PosteriorDraws draws = run_chain(spec, cd, config);
  RandomStream rng(derive_seed(config.seed, "simulate"));
  PredictiveDraws p = predictive_simulate(spec, draws, rng);
  p.origin = origin;
  p.target_date = w.target_date;
  p.realized = w.realized;
  p.seed = config.seed;
  if (keep) *keep = std::move(draws);
  return p;
}

std::vector<PredictiveDraws> recursive_forecast(const ModelSpec& spec, const data::RegressionData& full,
                                                Quarter eval_start, Quarter eval_end, const McmcConfig& config,
                                                int min_train) {
  std::vector<PredictiveDraws> out;
  for (Quarter origin : forecast_origins(full, eval_start, eval_end, min_train)) {
    out.push_back(forecast_cell(spec, full, origin, config));
  }
  return out;
}

}  // namespace bnpfc::engine
