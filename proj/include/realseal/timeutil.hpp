#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace realseal {

// UTC timestamps at second resolution, serialized as YYYY-MM-DDThh:mm:ssZ.
// Proleptic Gregorian calendar, years 0001-9999, leap seconds ignored.

std::string format_utc(std::int64_t seconds_since_epoch);
std::optional<std::int64_t> parse_utc(std::string_view text);
std::int64_t now_utc();

}  // namespace realseal
