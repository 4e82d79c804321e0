#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fdia_lab {

/// Shortest "%.17g"-style text for a double; round-trips exactly.
std::string fmt17(double v);

void append17(std::string& out, double v);

/// Splits one CSV line on commas (no quoting support; the library never
/// emits quoted fields).
std::vector<std::string_view> split_csv(std::string_view line);

double parse_double(std::string_view s);

}  // namespace fdia_lab
