#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace smellsurv {

/// UTC instant with one-second resolution.
using Timestamp = std::chrono::sys_seconds;

/// Parses `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS]` (a space may replace the
/// `T`), with an optional `Z` or `+hh:mm` / `-hh:mm` suffix. Offsets are
/// folded into UTC. Returns nullopt on anything else.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// `YYYY-MM-DD` for midnight instants, `YYYY-MM-DDTHH:MM:SSZ` otherwise.
std::string format_timestamp(Timestamp t);

/// Elapsed days from `from` to `to` (fractional, may be negative).
double days_between(Timestamp from, Timestamp to);

}  // namespace smellsurv
