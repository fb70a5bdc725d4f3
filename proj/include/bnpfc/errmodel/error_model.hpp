#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bnpfc/core/linalg.hpp"
#include "bnpfc/core/random.hpp"
#include "bnpfc/errmodel/dpm.hpp"
#include "bnpfc/errmodel/sv.hpp"

namespace bnpfc::errmodel {

enum class ErrorKind { Homosk, Dpm, Sv, DpmSv };

std::string to_string(ErrorKind kind);
ErrorKind parse_error_kind(std::string_view text);

struct ErrorPriors {
  DpmPrior dpm;
  SvPrior sv;
  double homosk_shape = 3.0;  // sigma^2 ~ InvGamma(shape, shape * s2_ols)
};

/// Error block of a chain. Homosk uses `sigma2`; DPM uses `dpm` (with
/// component variances); SV uses `sv`; DPM-SV uses `dpm` (means only) and `sv`.
struct ErrorState {
  ErrorKind kind = ErrorKind::Homosk;
  double sigma2 = 1.0;
  double homosk_scale = 1.0;
  std::optional<DpmState> dpm;
  std::optional<SvState> sv;
};

/// Neutral starting state: unit-cluster mixture, flat log variance at log s2_ols.
ErrorState init_error_state(ErrorKind kind, Eigen::Index T, double s2_ols, const ErrorPriors& priors);

/// Full error-block update given eps_t = y_t - f_t.
void update_error_state(const Vector& resid, ErrorState& state, const ErrorPriors& priors, RandomStream& rng);

/// Per-observation error variances.
Vector error_variance_diag(const ErrorState& state, Eigen::Index T);

/// Per-observation error means (mixture component means, else zero).
Vector error_mean(const ErrorState& state, Eigen::Index T);

struct MixtureComponent {
  double weight = 1.0;
  double offset = 0.0;
  double variance = 1.0;
};

/// Error distribution at the forecast target, h steps after the last
/// observation: all mixture components with their weights (one for Homosk/SV).
/// SV kinds simulate the log variance forward, so this is itself a draw.
std::vector<MixtureComponent> error_predictive_components(const ErrorState& state, int h, RandomStream& rng);

/// (offset, variance) of one draw: a component picked by weight.
MixtureComponent error_predictive_draw(const ErrorState& state, int h, RandomStream& rng);

}  // namespace bnpfc::errmodel
