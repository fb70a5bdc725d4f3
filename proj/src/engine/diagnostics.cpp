#include "bnpfc/engine/diagnostics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bnpfc/core/log.hpp"

namespace bnpfc::engine {
namespace {

double parzen(double x) {
  x = std::abs(x);
  if (x <= 0.5) return 1.0 - 6.0 * x * x + 6.0 * x * x * x;
  if (x <= 1.0) return 2.0 * std::pow(1.0 - x, 3);
  return 0.0;
}

}  // namespace

double inefficiency_factor(std::span<const double> trace, double taper) {
  const std::size_t n = trace.size();
  if (n < 100) throw std::invalid_argument("inefficiency_factor needs at least 100 draws");
  double mean = 0.0;
  for (double x : trace) mean += x;
  mean /= static_cast<double>(n);
  std::vector<double> d(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = trace[i] - mean;
    var += d[i] * d[i];
  }
  if (!(var > 1e-300 * static_cast<double>(n))) {
    log_warning("inefficiency_factor: constant trace, reporting 1");
    return 1.0;
  }
  const auto bandwidth = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(taper * static_cast<double>(n))));
  double sum = 0.0;
  for (std::size_t k = 1; k <= bandwidth && k < n; ++k) {
    double c = 0.0;
    for (std::size_t i = k; i < n; ++i) c += d[i] * d[i - k];
    sum += parzen(static_cast<double>(k) / static_cast<double>(bandwidth)) * c / var;
  }
  return 1.0 + 2.0 * sum;
}

}  // namespace bnpfc::engine
