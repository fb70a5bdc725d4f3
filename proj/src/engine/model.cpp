#include "bnpfc/engine/model.hpp"

#include <cmath>
#include <sstream>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/gp/subspace.hpp"

namespace bnpfc::engine {

namespace em = errmodel;

std::string to_string(MeanKind kind) {
  switch (kind) {
    case MeanKind::UC:
      return "UC";
    case MeanKind::Linear:
      return "Linear";
    case MeanKind::GP:
      return "GP";
    case MeanKind::GPSub:
      return "GPSub";
  }
  return "?";
}

MeanKind parse_mean_kind(std::string_view text) {
  if (text == "UC") return MeanKind::UC;
  if (text == "Linear") return MeanKind::Linear;
  if (text == "GP") return MeanKind::GP;
  if (text == "GPSub" || text == "GP-sub" || text == "GPsub") return MeanKind::GPSub;
  throw ConfigError("unknown mean kind '" + std::string(text) + "'");
}

std::string ModelSpec::id() const { return to_string(mean) + "-" + em::to_string(error); }

gp::ProjectionOptions ModelSpec::projection_options() const {
  gp::ProjectionOptions o;
  o.force_pcs = dataset.variant == data::DatasetVariant::Large;
  return o;
}

ModelSpec parse_model_id(std::string_view id, const data::DatasetSpec& dataset) {
  const auto dash = id.find('-');
  if (dash == std::string_view::npos) throw ConfigError("model id '" + std::string(id) + "' is not Mean-Error");
  ModelSpec spec;
  spec.mean = parse_mean_kind(id.substr(0, dash));
  spec.error = em::parse_error_kind(id.substr(dash + 1));
  spec.dataset = dataset;
  return spec;
}

void McmcConfig::validate() const {
  if (n_iter < 1) throw ConfigError("mcmc.n_iter must be positive");
  if (n_burn < 0 || n_burn >= n_iter) throw ConfigError("mcmc.n_burn must satisfy 0 <= n_burn < n_iter");
  if (thin < 1) throw ConfigError("mcmc.thin must be at least 1");
  if (retained() < 1) throw ConfigError("mcmc settings retain no draws");
  if (!(initial_step > 0.0)) throw ConfigError("mcmc.initial_step must be positive");
}

ChainData make_chain_data(const ModelSpec& spec, const Vector& y, const Matrix& X, const std::optional<Vector>& x_new) {
  if (y.size() < 2) throw DataError("chain needs at least two observations");
  ChainData d;
  d.horizon = spec.horizon();
  d.y_offset = y.mean();
  d.y = y.array() - d.y_offset;
  if (spec.mean == MeanKind::UC) return d;
  if (X.rows() != y.size()) throw DataError("design rows do not match the target length");
  d.X = X;
  d.sqdist = gp::squared_distances(X);
  d.proj = gp::projection_matrix(X, spec.projection_options());
  if (x_new) {
    if (x_new->size() != X.cols()) throw DataError("forecast row has the wrong number of predictors");
    d.x_new = *x_new;
  }
  return d;
}

namespace {

double initial_variance(const ModelSpec& spec, const ChainData& data) {
  const Eigen::Index T = data.rows();
  double s2 = data.y.squaredNorm() / static_cast<double>(T - 1);
  if (spec.mean != MeanKind::UC) {
    const Eigen::Index dof = T - data.proj->rank();
    if (dof > 0) s2 = data.proj->residual_quadratic(data.y) / static_cast<double>(dof);
  }
  return s2 > 1e-12 ? s2 : 1.0;
}

struct LinearEval {
  gp::LinearConditional cond;
  double log_lik() const { return cond.log_lik(); }
};

void check_vector(const Vector& v, Eigen::Index T, const char* block, std::ostringstream& why) {
  if (v.size() != T) why << block << " has length " << v.size() << "; ";
  else if (!v.allFinite()) why << block << " is not finite; ";
}

}  // namespace

ChainState init_chain(const ModelSpec& spec, const ChainData& data, const McmcConfig& config) {
  const Eigen::Index T = data.rows();
  ChainState s;
  const double s2 = initial_variance(spec, data);
  s.error = em::init_error_state(spec.error, T, s2, spec.priors.error);
  if (spec.mean == MeanKind::UC) {
    s.trend = TrendBlock{data.y, spec.priors.uc.var_scale / (spec.priors.uc.var_shape - 1.0)};
    return s;
  }
  GpBlock g;
  g.f = Vector::Zero(T);
  g.tau2 = 1.0;
  g.step.log_scale = std::log(config.initial_step);
  if (spec.mean == MeanKind::Linear) g.coef = Vector::Zero(data.proj->rank());
  s.gp = std::move(g);
  return s;
}

void check_chain_state(const ModelSpec& spec, const ChainState& s, Eigen::Index T) {
  std::ostringstream why;
  const bool uc = spec.mean == MeanKind::UC;
  if (uc != s.trend.has_value() || uc == s.gp.has_value()) why << "mean block does not match the model; ";
  if (s.gp) {
    check_vector(s.gp->f, T, "f", why);
    const auto& h = s.gp->hyper;
    if (!(h.xi > 0.0 && h.xi < 1.0 && h.phi > 0.0 && h.phi < 1.0)) why << "kernel hyperparameters out of range; ";
    if (spec.mean == MeanKind::GPSub && !(s.gp->tau2 > 0.0 && std::isfinite(s.gp->tau2))) why << "tau2 " << s.gp->tau2 << "; ";
  }
  if (s.trend) {
    check_vector(s.trend->path, T, "trend", why);
    if (!(s.trend->var > 0.0 && std::isfinite(s.trend->var))) why << "trend variance " << s.trend->var << "; ";
  }
  if (s.error.kind != spec.error) why << "error block does not match the model; ";
  if (spec.error == em::ErrorKind::Homosk && !(s.error.sigma2 > 0.0 && std::isfinite(s.error.sigma2)))
    why << "sigma2 " << s.error.sigma2 << "; ";
  if (s.error.sv) {
    check_vector(s.error.sv->h, T, "log-volatility", why);
    if (!std::isfinite(s.error.sv->mu) || !std::isfinite(s.error.sv->rho) || !(s.error.sv->sigma2 > 0.0))
      why << "SV parameters; ";
  }
  if (s.error.dpm) {
    try {
      em::check_dpm_state(*s.error.dpm, T);
    } catch (const NumericalError& e) {
      why << e.what() << "; ";
    }
    for (double m : s.error.dpm->mean)
      if (!std::isfinite(m)) {
        why << "mixture mean is not finite; ";
        break;
      }
  }
  const std::string msg = why.str();
  if (!msg.empty()) throw NumericalError(msg);
}

ssm::ScalarStateSpace uc_state_space(const Vector& y, const Vector& obs_mean, const Vector& obs_var, double trend_var,
                                     const UcPrior& prior) {
  ssm::ScalarStateSpace m;
  m.z = y - obs_mean;
  m.r = obs_var;
  m.c = 0.0;
  m.a = 1.0;
  m.q = trend_var;
  m.m0 = m.z(0);
  m.p0 = prior.init_var;
  return m;
}

Vector uc_trend_path(const Vector& y, const Vector& obs_mean, const Vector& obs_var, double trend_var,
                     const UcPrior& prior, RandomStream& rng) {
  return ssm::ffbs_draw(uc_state_space(y, obs_mean, obs_var, trend_var, prior), rng);
}

void uc_trend_update(const Vector& y, TrendBlock& trend, const em::ErrorState& error, const UcPrior& prior,
                     RandomStream& rng) {
  const Eigen::Index T = y.size();
  trend.path = uc_trend_path(y, em::error_mean(error, T), em::error_variance_diag(error, T), trend.var, prior, rng);
  double ss = 0.0;
  for (Eigen::Index t = 1; t < T; ++t) ss += (trend.path(t) - trend.path(t - 1)) * (trend.path(t) - trend.path(t - 1));
  trend.var = rng.inverse_gamma(prior.var_shape + 0.5 * static_cast<double>(T - 1), prior.var_scale + 0.5 * ss);
}

void mcmc_step(const ModelSpec& spec, const ChainData& data, ChainState& s, RandomStream& rng, bool adapting) {
  const Eigen::Index T = data.rows();
  const Vector resid = data.y - s.fit();
  em::update_error_state(resid, s.error, spec.priors.error, rng);

  if (spec.mean == MeanKind::UC) {
    uc_trend_update(data.y, *s.trend, s.error, spec.priors.uc, rng);
    return;
  }

  GpBlock& g = *s.gp;
  g.step.adapting = adapting;
  const Vector sigma = em::error_variance_diag(s.error, T);
  const Vector r = data.y - em::error_mean(s.error, T);
  const gp::Projection& proj = *data.proj;

  if (spec.mean == MeanKind::Linear && spec.priors.linear == LinearPrior::Flat) {
    const Matrix w = proj.basis.transpose() * sigma.cwiseInverse().asDiagonal();
    const Eigen::LLT<Matrix> h(w * proj.basis);
    if (h.info() != Eigen::Success) throw NumericalError("linear coefficient precision not positive definite");
    Vector z(proj.rank());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    g.coef = h.solve(w * r) + h.matrixU().solve(z);
    g.f = proj.basis * g.coef;
    return;
  }
  if (spec.mean == MeanKind::Linear) {
    auto eval = [&](const gp::KernelHyper& h) {
      const Matrix K = gp::kernel_from_distances(data.sqdist, h);
      const SpdFactor kf = factorize_spd(K, h.xi, 0.0);
      return LinearEval{gp::LinearConditional(proj.basis, gp::linear_limit_precision(kf, proj), sigma, r)};
    };
    std::optional<LinearEval> current;
    gp::sample_kernel_hyper(g.hyper, current, eval, g.step, rng);
    g.coef = current->cond.draw_coef(rng);
    g.f = proj.basis * g.coef;
    return;
  }

  if (spec.mean == MeanKind::GPSub) g.tau2 = gp::sample_tau2(g.f, proj, g.tau2, spec.priors.tau2, rng);
  const double tau2 = spec.mean == MeanKind::GPSub ? g.tau2 : std::numeric_limits<double>::infinity();
  auto eval = [&](const gp::KernelHyper& h) {
    const Matrix K = gp::kernel_from_distances(data.sqdist, h);
    return gp::GpConditional(gp::subspace_kernel(K, proj, tau2), sigma, r);
  };
  std::optional<gp::GpConditional> current;
  gp::sample_kernel_hyper(g.hyper, current, eval, g.step, rng);
  g.f = current->draw(rng);
}

}  // namespace bnpfc::engine
