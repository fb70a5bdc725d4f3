#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/data/panel.hpp"

namespace bnpfc::data {

class TransformError : public DataError {
 public:
  TransformError(const std::string& what, std::size_t index)
      : DataError(what), index_(index) {}
  /// Position in the input series of the offending value.
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Leading observations consumed by a code: 1,4 -> 0; 2,5 -> 1; 3,6,7 -> 2.
int differencing_order(int code);

/// FRED-QD transformation codes:
///   1 level, 2 first difference, 3 second difference, 4 log,
///   5 first difference of log, 6 second difference of log,
///   7 first difference of (x_t / x_{t-1} - 1).
/// The output drops the undefined leading entries.
std::vector<double> apply_transform(std::span<const double> series, int code);

/// Applies every series' code on its non-missing span and trims the leading
/// rows lost to the largest differencing order from all series. Errors name the
/// series and date of the offending value.
SeriesPanel transform_panel(const SeriesPanel& raw);

/// y_t = (400 / h) ln(P_{t+h} / P_t); length len(P) - h.
std::vector<double> build_target(std::span<const double> price, int horizon);

}  // namespace bnpfc::data
