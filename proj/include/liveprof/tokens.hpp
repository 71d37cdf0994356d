#pragma once

// Parsers for single text tokens. Shared by CSV type inference and the DSL's
// cast functions so both agree on what "parses as an integer" means.

#include "liveprof/table.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace liveprof {

struct CivilDate {
    std::int64_t year = 1970;
    unsigned month = 1;
    unsigned day = 1;
};

/// Days since 1970-01-01 for a proleptic Gregorian date.
[[nodiscard]] std::int64_t days_from_civil(std::int64_t year, unsigned month, unsigned day) noexcept;
[[nodiscard]] CivilDate civil_from_days(std::int64_t days) noexcept;

[[nodiscard]] std::string_view trim(std::string_view s) noexcept;

/// `true`/`false` in any letter case, after trimming.
[[nodiscard]] std::optional<bool> parse_bool(std::string_view token) noexcept;

/// Optional sign followed by decimal digits, after trimming. Values outside
/// the int64 range fail.
[[nodiscard]] std::optional<std::int64_t> parse_int(std::string_view token) noexcept;

/// Decimal or scientific notation, after trimming. Rejects inf/nan spellings
/// and anything that overflows to a non-finite double.
[[nodiscard]] std::optional<double> parse_float(std::string_view token) noexcept;

/// `YYYY-MM-DD`, `YYYY-MM-DD HH:MM[:SS]` or `YYYY-MM-DDTHH:MM[:SS][Z]`,
/// interpreted as UTC.
[[nodiscard]] std::optional<Timestamp> parse_timestamp(std::string_view token) noexcept;

}  // namespace liveprof
