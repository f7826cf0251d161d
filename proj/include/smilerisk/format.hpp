#pragma once

#include <string>
#include <string_view>

namespace smilerisk {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

/// Strict full-string parse; returns false on any trailing garbage.
bool parse_number(std::string_view text, double& out);

}  // namespace smilerisk
