#pragma once

#include <span>

namespace bnpfc::engine {

/// 1 + 2 sum_k w(k / B) rho_k with Parzen weights and bandwidth B = taper * n.
/// A constant trace gives 1 with a warning. Requires at least 100 values.
double inefficiency_factor(std::span<const double> trace, double taper = 0.04);

}  // namespace bnpfc::engine
