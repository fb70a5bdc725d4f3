#include "bnpfc/core/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace bnpfc {

double RandomStream::uniform() {
  // 53-bit mantissa, strictly inside (0, 1).
  for (;;) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double RandomStream::gamma(double shape, double rate) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_) / rate;
}

double RandomStream::inverse_gamma(double shape, double scale) {
  return 1.0 / gamma(shape, scale);
}

double RandomStream::beta(double a, double b) {
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  const double s = x + y;
  if (s <= 0.0) return a >= b ? 1.0 : 0.0;
  return x / s;
}

double RandomStream::truncated_gamma(double shape, double rate, double upper) {
  if (rate > 0.0 && rate * upper >= 0.5 * shape) {
    // The truncation point is not deep in the left tail: invert the CDF.
    const double p_upper = boost::math::gamma_p(shape, rate * upper);
    if (p_upper > 1e-250) {
      const double u = uniform() * p_upper;
      const double x = boost::math::gamma_p_inv(shape, u) / rate;
      return std::min(x, upper);
    }
  }
  // Deep left tail (or rate 0): the density is increasing on (0, upper).
  // Propose from x^{c-1} on (0, upper) with c = shape - rate * upper and
  // accept with the log-concave ratio, which peaks at the upper bound.
  const double c = std::max(shape - rate * upper, 1e-3);
  const double k = shape - c;
  for (;;) {
    const double x = upper * std::pow(uniform(), 1.0 / c);
    const double log_ratio = k * std::log(x / upper) - rate * (x - upper);
    if (std::log(uniform()) <= log_ratio) return x;
  }
}

std::size_t RandomStream::categorical_from_log(const double* log_weights, std::size_t n) {
  double max_lw = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) max_lw = std::max(max_lw, log_weights[j]);
  double total = 0.0;
  thread_local std::vector<double> cumulative;
  cumulative.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    total += std::isfinite(log_weights[j]) ? std::exp(log_weights[j] - max_lw) : 0.0;
    cumulative[j] = total;
  }
  const double u = uniform() * total;
  for (std::size_t j = 0; j < n; ++j) {
    if (u < cumulative[j]) return j;
  }
  return n - 1;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = master ^ (h + 0x9e3779b97f4a7c15ULL + (master << 6) + (master >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;  // splitmix64 finalizer
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace bnpfc
