#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace dlrsim {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

/// Accepts "YYYY-MM-DDTHH:MM:SSZ", "YYYY-MM-DDTHH:MM:SS", "YYYY-MM-DD HH:MM:SS"
/// and a bare "YYYY-MM-DD" (midnight). Throws std::invalid_argument.
Timestamp parse_timestamp(const std::string& text);

/// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Timestamp t);

std::chrono::year_month_day civil_date(Timestamp t);

/// Hours since local midnight, in [0, 24).
double hour_of_day(Timestamp t);

Timestamp to_timestamp(std::chrono::year_month_day date);

}  // namespace dlrsim
