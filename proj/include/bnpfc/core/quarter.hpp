#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace bnpfc {

/// A calendar quarter, stored as a single ordinal (year * 4 + quarter - 1).
class Quarter {
 public:
  constexpr Quarter() = default;
  static constexpr Quarter from_ordinal(int ordinal) {
    Quarter q;
    q.ordinal_ = ordinal;
    return q;
  }
  static Quarter from_year_quarter(int year, int quarter);

  /// Accepts "1980Q1", "1980-Q1", "1980:Q1", "1980-Q1"-like spellings,
  /// ISO "YYYY-MM-DD" and FRED-style "M/D/YYYY" (any month maps to its quarter).
  static Quarter parse(std::string_view text);

  constexpr int ordinal() const { return ordinal_; }
  constexpr int year() const { return ordinal_ >= 0 ? ordinal_ / 4 : (ordinal_ - 3) / 4; }
  constexpr int quarter() const { return ordinal_ - year() * 4 + 1; }

  std::string to_string() const;

  constexpr Quarter operator+(int n) const { return from_ordinal(ordinal_ + n); }
  constexpr Quarter operator-(int n) const { return from_ordinal(ordinal_ - n); }
  constexpr int operator-(Quarter other) const { return ordinal_ - other.ordinal_; }
  constexpr auto operator<=>(const Quarter&) const = default;

 private:
  int ordinal_ = 0;
};

}  // namespace bnpfc
