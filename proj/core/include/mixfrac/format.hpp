#pragma once

#include <string>
#include <vector>

namespace mixfrac {

/// Decimal text with 17 significant digits ("inf", "-inf", "nan" for
/// non-finite values). Identical inputs always give identical bytes.
std::string format_double(double v);

/// Joins already formatted fields with commas.
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace mixfrac
