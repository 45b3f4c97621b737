#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace oiss::csv {

// 17 significant digits, round-trip exact for doubles.
std::string format_number(double x);

std::string join_row(const std::vector<double>& values);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Header row is mandatory. Blank lines and lines starting with '#' are skipped.
Table read_table(const std::filesystem::path& path);
Table parse_table(std::string_view text);

std::vector<std::string> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);
double parse_double(std::string_view s);

}  // namespace oiss::csv
