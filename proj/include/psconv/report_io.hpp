#pragma once

#include <string>

#include "psconv/analyzer.hpp"

namespace psconv {

/// Shortest locale-independent text for a real with 17 significant digits.
std::string format_real(double value);

std::string report_json(const CostReport& r);

/// One row per conv layer followed by a "total" row.
std::string report_csv(const CostReport& r);

}  // namespace psconv
