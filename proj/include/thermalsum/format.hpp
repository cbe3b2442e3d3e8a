#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace thermalsum {

// printf("%.6g"); "NA" for NaN.
std::string fmt_sig6(double value);

// Shortest text that parses back to exactly `value`.
std::string fmt_exact(double value);

// Fixed-point with `digits` decimals; "NA" for NaN.
std::string fmt_fixed(double value, int digits);

// Splits one CSV line on commas. Double-quoted fields may contain commas;
// "" inside quotes is a literal quote. A trailing '\r' is dropped.
std::vector<std::string> split_csv_line(std::string_view line);

std::string_view trim(std::string_view text);

} // namespace thermalsum
