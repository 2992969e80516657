#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "bcl/bounds.hpp"

namespace bcl {

/// One JSON object per report. Non-finite numbers become null.
nlohmann::json report_to_json(const BoundReport& report);

/// Header and rows for bound_id, seed, gamma, beta, lhs, rhs, tightness, vacuous.
std::string report_csv_header();
std::string report_csv_row(const BoundReport& report, std::uint64_t seed);

}  // namespace bcl
