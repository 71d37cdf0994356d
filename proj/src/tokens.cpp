#include "liveprof/tokens.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace liveprof {

// Howard Hinnant's civil-calendar algorithms.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) noexcept {
    y -= m <= 2 ? 1 : 0;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) noexcept {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2 ? 1 : 0), m, d};
}

std::string_view trim(std::string_view s) noexcept {
    const auto is_space = [](char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
    };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

namespace {

bool iequals(std::string_view a, std::string_view b) noexcept {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        char x = a[i];
        if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
        if (x != b[i]) return false;
    }
    return true;
}

bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

bool read_fixed_digits(std::string_view s, std::size_t pos, std::size_t n, unsigned& out) noexcept {
    if (pos + n > s.size()) return false;
    out = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (!is_digit(s[i])) return false;
        out = out * 10 + static_cast<unsigned>(s[i] - '0');
    }
    return true;
}

bool is_leap(std::int64_t y) noexcept { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) noexcept {
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

}  // namespace

std::optional<bool> parse_bool(std::string_view token) noexcept {
    token = trim(token);
    if (iequals(token, "true")) return true;
    if (iequals(token, "false")) return false;
    return std::nullopt;
}

std::optional<std::int64_t> parse_int(std::string_view token) noexcept {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    const std::size_t digits_start = !token.empty() && token.front() == '-' ? 1 : 0;
    if (token.size() == digits_start) return std::nullopt;
    for (std::size_t i = digits_start; i < token.size(); ++i) {
        if (!is_digit(token[i])) return std::nullopt;
    }
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
    return v;
}

std::optional<double> parse_float(std::string_view token) noexcept {
    token = trim(token);
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
        if (!token.empty() && token.front() == '-') return std::nullopt;
    }
    // mantissa: digits [. digits] | . digits ; optional exponent
    std::size_t i = 0;
    if (i < token.size() && token[i] == '-') ++i;
    std::size_t mantissa_digits = 0;
    while (i < token.size() && is_digit(token[i])) ++i, ++mantissa_digits;
    if (i < token.size() && token[i] == '.') {
        ++i;
        while (i < token.size() && is_digit(token[i])) ++i, ++mantissa_digits;
    }
    if (mantissa_digits == 0) return std::nullopt;
    if (i < token.size() && (token[i] == 'e' || token[i] == 'E')) {
        ++i;
        if (i < token.size() && (token[i] == '+' || token[i] == '-')) ++i;
        std::size_t exp_digits = 0;
        while (i < token.size() && is_digit(token[i])) ++i, ++exp_digits;
        if (exp_digits == 0) return std::nullopt;
    }
    if (i != token.size()) return std::nullopt;

    double v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<Timestamp> parse_timestamp(std::string_view token) noexcept {
    const std::string_view s = trim(token);
    unsigned year = 0, month = 0, day = 0;
    if (s.size() < 10 || !read_fixed_digits(s, 0, 4, year) || s[4] != '-' ||
        !read_fixed_digits(s, 5, 2, month) || s[7] != '-' || !read_fixed_digits(s, 8, 2, day)) {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) return std::nullopt;

    unsigned hh = 0, mm = 0, ss = 0;
    if (s.size() > 10) {
        const char sep = s[10];
        if (sep != ' ' && sep != 'T') return std::nullopt;
        if (!read_fixed_digits(s, 11, 2, hh) || s.size() < 16 || s[13] != ':' ||
            !read_fixed_digits(s, 14, 2, mm)) {
            return std::nullopt;
        }
        std::size_t pos = 16;
        if (pos < s.size() && s[pos] == ':') {
            if (!read_fixed_digits(s, pos + 1, 2, ss)) return std::nullopt;
            pos += 3;
        }
        if (pos < s.size() && s[pos] == 'Z' && sep == 'T') ++pos;
        if (pos != s.size()) return std::nullopt;
        if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    }
    const std::int64_t days = days_from_civil(year, month, day);
    const std::int64_t secs = days * 86400 + hh * 3600 + mm * 60 + ss;
    return Timestamp{secs * 1000};
}

}  // namespace liveprof
