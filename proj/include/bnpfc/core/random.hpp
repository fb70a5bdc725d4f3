#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bnpfc {

/// One random stream per chain. Wraps a 64-bit Mersenne Twister together with
/// the standard-normal generator so draws are reproducible from the seed alone.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform();                       // (0, 1)
  double normal() { return normal_(engine_); }
  double normal(double mean, double sd) { return mean + sd * normal_(engine_); }
  double gamma(double shape, double rate);  // mean shape / rate
  double inverse_gamma(double shape, double scale);  // 1 / Gamma(shape, rate = scale)
  double beta(double a, double b);
  /// Gamma(shape, rate) restricted to (0, upper). rate = 0 gives the power-law limit.
  double truncated_gamma(double shape, double rate, double upper);
  std::size_t categorical_from_log(const double* log_weights, std::size_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Stable 64-bit mixing of a master seed with a text tag (model id, date, ...).
/// Independent of std::hash so seeds agree across platforms and runs.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

}  // namespace bnpfc
