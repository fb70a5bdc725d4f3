#include "bnpfc/errmodel/error_model.hpp"

#include <cmath>

#include "bnpfc/core/errors.hpp"

namespace bnpfc::errmodel {

std::string to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Homosk:
      return "Homosk";
    case ErrorKind::Dpm:
      return "DPM";
    case ErrorKind::Sv:
      return "SV";
    case ErrorKind::DpmSv:
      return "DPMSV";
  }
  return "?";
}

ErrorKind parse_error_kind(std::string_view text) {
  if (text == "Homosk" || text == "Homosk.") return ErrorKind::Homosk;
  if (text == "DPM") return ErrorKind::Dpm;
  if (text == "SV") return ErrorKind::Sv;
  if (text == "DPMSV" || text == "DPM-SV") return ErrorKind::DpmSv;
  throw ConfigError("unknown error kind '" + std::string(text) + "'");
}

ErrorState init_error_state(ErrorKind kind, Eigen::Index T, double s2_ols, const ErrorPriors& priors) {
  ErrorState s;
  s.kind = kind;
  const double s2 = s2_ols > 0.0 ? s2_ols : 1.0;
  s.sigma2 = s2;
  s.homosk_scale = priors.homosk_shape * s2;
  if (kind == ErrorKind::Dpm) s.dpm = init_dpm(T, s2, priors.dpm, true);
  if (kind == ErrorKind::DpmSv) s.dpm = init_dpm(T, s2, priors.dpm, false);
  if (kind == ErrorKind::Sv || kind == ErrorKind::DpmSv) s.sv = init_sv(T, std::log(s2));
  return s;
}

void update_error_state(const Vector& resid, ErrorState& s, const ErrorPriors& priors, RandomStream& rng) {
  const Eigen::Index T = resid.size();
  switch (s.kind) {
    case ErrorKind::Homosk:
      s.sigma2 = rng.inverse_gamma(priors.homosk_shape + 0.5 * static_cast<double>(T),
                                   s.homosk_scale + 0.5 * resid.squaredNorm());
      break;
    case ErrorKind::Dpm:
      dpm_sweep(resid, Vector(), *s.dpm, priors.dpm, rng);
      break;
    case ErrorKind::Sv:
      sv_update(resid, *s.sv, priors.sv, rng);
      break;
    case ErrorKind::DpmSv: {
      const Vector var = s.sv->h.array().exp();
      dpm_sweep(resid, var, *s.dpm, priors.dpm, rng);
      sv_update(resid - error_mean(s, T), *s.sv, priors.sv, rng);
      break;
    }
  }
}

Vector error_variance_diag(const ErrorState& s, Eigen::Index T) {
  switch (s.kind) {
    case ErrorKind::Homosk:
      return Vector::Constant(T, s.sigma2);
    case ErrorKind::Dpm: {
      Vector v(T);
      for (Eigen::Index t = 0; t < T; ++t) v(t) = s.dpm->var[static_cast<std::size_t>(s.dpm->alloc[static_cast<std::size_t>(t)])];
      return v;
    }
    case ErrorKind::Sv:
    case ErrorKind::DpmSv:
      return s.sv->h.array().exp();
  }
  return Vector::Ones(T);
}

Vector error_mean(const ErrorState& s, Eigen::Index T) {
  if (!s.dpm) return Vector::Zero(T);
  Vector m(T);
  for (Eigen::Index t = 0; t < T; ++t) m(t) = s.dpm->mean[static_cast<std::size_t>(s.dpm->alloc[static_cast<std::size_t>(t)])];
  return m;
}

std::vector<MixtureComponent> error_predictive_components(const ErrorState& s, int h, RandomStream& rng) {
  double common_var = s.sigma2;
  if (s.sv) common_var = std::exp(sv_forecast_logvar(*s.sv, h, rng));
  if (!s.dpm) return {MixtureComponent{1.0, 0.0, common_var}};
  std::vector<MixtureComponent> out;
  out.reserve(s.dpm->weights.size());
  for (std::size_t j = 0; j < s.dpm->weights.size(); ++j) {
    const double var = s.kind == ErrorKind::Dpm ? s.dpm->var[j] : common_var;
    out.push_back({s.dpm->weights[j], s.dpm->mean[j], var});
  }
  return out;
}

MixtureComponent error_predictive_draw(const ErrorState& s, int h, RandomStream& rng) {
  const auto comps = error_predictive_components(s, h, rng);
  if (comps.size() == 1) return comps.front();
  double u = rng.uniform();
  for (const auto& c : comps) {
    if (u < c.weight) return c;
    u -= c.weight;
  }
  return comps.back();
}

}  // namespace bnpfc::errmodel
