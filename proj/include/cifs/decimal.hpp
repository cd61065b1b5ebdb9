#pragma once

#include <string>
#include <string_view>

namespace cifs {

// Shortest round-trip decimal text for a double.
std::string to_decimal(double v);
// Exact parse of a decimal string; throws InvalidArgument on junk.
double parse_decimal(std::string_view s);

}  // namespace cifs
