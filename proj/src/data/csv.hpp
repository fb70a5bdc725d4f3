#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bnpfc::detail {

using CsvRow = std::vector<std::string>;

/// Minimal RFC-4180 reader: comma separated, double-quoted fields, CRLF tolerated.
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

std::string trim(std::string s);

/// Empty, "NA", "NaN", "." and "null" read as NaN.
double parse_number(const std::string& cell, bool* ok);

std::string format_number(double x, int digits = 12);

}  // namespace bnpfc::detail
