#include "oiss/grid.hpp"

#include <cmath>

#include "oiss/csv.hpp"
#include "oiss/error.hpp"

namespace oiss {

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi) || n == 0) {
    throw DomainError("log grid needs 0 < lo <= hi < inf and n >= 1");
  }
  if (n == 1) return {lo};
  std::vector<double> grid(n);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> lin_grid(double lo, double hi, std::size_t n) {
  if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi) || n == 0) {
    throw DomainError("linear grid needs 0 <= lo <= hi < inf and n >= 1");
  }
  if (n == 1) return {lo};
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  grid.back() = hi;
  return grid;
}

void require_increasing(const std::vector<double>& grid, std::string_view what) {
  if (grid.empty()) throw DomainError(std::string(what) + ": grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] < 0.0) {
      throw DomainError(std::string(what) + ": grid values must be finite and nonnegative");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw DomainError(std::string(what) + ": grid must be strictly increasing");
    }
  }
}

GridSpec parse_grid(std::string_view spec) {
  spec = csv::trim(spec);
  if (spec == "breakpoints") return BlockBreakpoints{};
  std::vector<double> grid;
  if (spec.starts_with("log:") || spec.starts_with("lin:")) {
    const auto parts = csv::split(spec, ':');
    if (parts.size() != 4) throw ParseError("grid spec must be KIND:A:B:N, got '" + std::string(spec) + "'");
    const double a = csv::parse_double(parts[1]);
    const double b = csv::parse_double(parts[2]);
    const double n = csv::parse_double(parts[3]);
    if (n < 1 || n != std::floor(n)) throw ParseError("grid point count must be a positive integer");
    grid = parts[0] == "log" ? log_grid(a, b, static_cast<std::size_t>(n))
                             : lin_grid(a, b, static_cast<std::size_t>(n));
  } else {
    for (const auto& cell : csv::split(spec, ',')) grid.push_back(csv::parse_double(cell));
  }
  require_increasing(grid, "grid '" + std::string(spec) + "'");
  return grid;
}

std::vector<double> parse_explicit_grid(std::string_view spec) {
  auto parsed = parse_grid(spec);
  if (std::holds_alternative<BlockBreakpoints>(parsed)) {
    throw ParseError("'breakpoints' grid is only valid for counterexample runs");
  }
  return std::get<std::vector<double>>(std::move(parsed));
}

}  // namespace oiss
