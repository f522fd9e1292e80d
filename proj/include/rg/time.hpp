#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rg {

/// Integer seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

inline constexpr Timestamp kBarSeconds = 4 * 3600;
inline constexpr Timestamp kDaySeconds = 24 * 3600;
inline constexpr int kBarsPerDay = 6;

[[nodiscard]] constexpr Timestamp floor_to_bar(Timestamp t) {
  Timestamp r = t % kBarSeconds;
  return r < 0 ? t - r - kBarSeconds : t - r;
}

[[nodiscard]] constexpr Timestamp floor_to_day(Timestamp t) {
  Timestamp r = t % kDaySeconds;
  return r < 0 ? t - r - kDaySeconds : t - r;
}

[[nodiscard]] constexpr bool on_bar_grid(Timestamp t) { return floor_to_bar(t) == t; }

/// Accepts "YYYY-MM-DDTHH:MM:SS" followed by "Z" or "+00:00" (a space may
/// replace the 'T'). Any other offset is rejected: all data must be UTC.
/// Throws rg::Error on malformed input.
Timestamp parse_utc(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_utc(Timestamp t);

}  // namespace rg
