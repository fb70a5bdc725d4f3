#include "bnpfc/core/quarter.hpp"

#include <cctype>
#include <charconv>
#include <string>
#include <vector>

#include "bnpfc/core/errors.hpp"

namespace bnpfc {
namespace {

int to_int(std::string_view s, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("unparseable date '" + std::string(whole) + "'");
  }
  return value;
}

std::vector<std::string_view> split_digits(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) parts.push_back(text.substr(i, j - i));
    i = j;
  }
  return parts;
}

}  // namespace

Quarter Quarter::from_year_quarter(int year, int quarter) {
  if (quarter < 1 || quarter > 4) {
    throw DataError("quarter must be in 1..4, got " + std::to_string(quarter));
  }
  return from_ordinal(year * 4 + quarter - 1);
}

Quarter Quarter::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (!text.empty() && text.front() == '"' && text.back() == '"' && text.size() >= 2) {
    text = text.substr(1, text.size() - 2);
  }
  const bool has_q = text.find('Q') != std::string_view::npos || text.find('q') != std::string_view::npos;
  const auto parts = split_digits(text);
  if (has_q && parts.size() == 2) {
    return from_year_quarter(to_int(parts[0], text), to_int(parts[1], text));
  }
  if (parts.size() == 3) {
    int year = 0;
    int month = 0;
    if (text.find('/') != std::string_view::npos) {  // M/D/YYYY
      month = to_int(parts[0], text);
      year = to_int(parts[2], text);
    } else {  // YYYY-MM-DD
      year = to_int(parts[0], text);
      month = to_int(parts[1], text);
    }
    if (month < 1 || month > 12) throw DataError("invalid month in date '" + std::string(text) + "'");
    return from_year_quarter(year, (month - 1) / 3 + 1);
  }
  throw DataError("unparseable date '" + std::string(text) + "'");
}

std::string Quarter::to_string() const {
  return std::to_string(year()) + "Q" + std::to_string(quarter());
}

}  // namespace bnpfc
