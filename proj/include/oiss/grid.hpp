#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oiss {

// Strictly increasing, finite, nonnegative sample points.
std::vector<double> log_grid(double lo, double hi, std::size_t n);
std::vector<double> lin_grid(double lo, double hi, std::size_t n);

// Throws DomainError unless values are finite, >= 0 and strictly increasing.
void require_increasing(const std::vector<double>& grid, std::string_view what);

// Grid requested by a caller: explicit values, or "the block breakpoints of
// whatever construction is in play", which only the consumer can resolve.
struct BlockBreakpoints {};
using GridSpec = std::variant<std::vector<double>, BlockBreakpoints>;

// Accepts `log:A:B:N`, `lin:A:B:N`, `breakpoints`, or a comma list `0.5,1,2`.
GridSpec parse_grid(std::string_view spec);

// parse_grid for contexts where `breakpoints` is meaningless.
std::vector<double> parse_explicit_grid(std::string_view spec);

}  // namespace oiss
