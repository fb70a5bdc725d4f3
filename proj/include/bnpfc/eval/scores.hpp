#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bnpfc/core/random.hpp"

namespace bnpfc::eval {

/// Probability grid used for quantile scores and the linear summaries.
inline const std::vector<double> kQuantileGrid{0.05, 0.1, 0.5, 0.9, 0.95};

/// Tick loss (y - q)(p - 1{y <= q}).
double quantile_score(double y, double q, double p);

/// Type-7 (linear interpolation) quantile of an ascending sample.
double sorted_quantile(std::span<const double> sorted, double p);

/// Quantiles of an unsorted sample at each p.
std::vector<double> sample_quantiles(std::vector<double> draws, std::span<const double> p);

/// One Gaussian mixture per posterior draw, stored columnar: draw i owns the
/// components begin[i] .. begin[i+1] - 1, whose weights sum to one.
struct DrawMixtures {
  std::vector<std::size_t> begin{0};
  std::vector<double> weight;
  std::vector<double> mean;
  std::vector<double> variance;

  std::size_t draws() const { return begin.size() - 1; }
  void add_component(double w, double m, double v) {
    weight.push_back(w);
    mean.push_back(m);
    variance.push_back(v);
  }
  void close_draw() { begin.push_back(weight.size()); }
};

/// y* from draw i: a component by weight, then a Gaussian.
double simulate_draw(const DrawMixtures& mix, std::size_t i, RandomStream& rng);

/// log of (1/N) sum_i sum_j w_ij N(y; m_ij, v_ij), evaluated with a max shift.
double log_pred_likelihood(const DrawMixtures& mix, double y);

/// Share of draws below y, ties split by a uniform draw.
double pit_value(std::span<const double> draws, double y, RandomStream& rng);

}  // namespace bnpfc::eval
