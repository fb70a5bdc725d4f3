#include "bnpfc/eval/scores.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bnpfc/core/errors.hpp"

namespace bnpfc::eval {

double quantile_score(double y, double q, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile_score: p must lie in (0, 1)");
  return (y - q) * (p - (y <= q ? 1.0 : 0.0));
}

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("sorted_quantile: empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> sample_quantiles(std::vector<double> draws, std::span<const double> p) {
  std::sort(draws.begin(), draws.end());
  std::vector<double> out;
  out.reserve(p.size());
  for (double pi : p) out.push_back(sorted_quantile(draws, pi));
  return out;
}

double simulate_draw(const DrawMixtures& mix, std::size_t i, RandomStream& rng) {
  std::size_t k = mix.begin[i];
  const std::size_t end = mix.begin[i + 1];
  if (end - k > 1) {
    double u = rng.uniform();
    for (; k + 1 < end; ++k) {
      if (u < mix.weight[k]) break;
      u -= mix.weight[k];
    }
  }
  return mix.mean[k] + std::sqrt(mix.variance[k]) * rng.normal();
}

double log_pred_likelihood(const DrawMixtures& mix, double y) {
  const std::size_t n = mix.draws();
  if (n == 0) throw std::invalid_argument("log_pred_likelihood: no draws");
  std::vector<double> terms;
  terms.reserve(mix.weight.size());
  for (std::size_t k = 0; k < mix.weight.size(); ++k) {
    if (!(mix.weight[k] > 0.0)) continue;
    const double v = mix.variance[k];
    const double d = y - mix.mean[k];
    double lt;
    if (v > 0.0) {
      lt = -0.5 * (std::log(2.0 * std::numbers::pi * v) + d * d / v);
    } else {
      lt = d == 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    }
    terms.push_back(std::log(mix.weight[k]) + lt);
  }
  const double top = terms.empty() ? -std::numeric_limits<double>::infinity() : *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  return top + std::log(sum) - std::log(static_cast<double>(n));
}

double pit_value(std::span<const double> draws, double y, RandomStream& rng) {
  if (draws.empty()) throw std::invalid_argument("pit_value: no draws");
  std::size_t below = 0, tied = 0;
  for (double d : draws) {
    if (d < y) ++below;
    else if (d == y) ++tied;
  }
  const double u = tied > 0 ? rng.uniform() : 0.0;
  return (static_cast<double>(below) + u * static_cast<double>(tied)) / static_cast<double>(draws.size());
}

}  // namespace bnpfc::eval
