#pragma once

#include "liveprof/error.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace liveprof::dsl {

enum class TokenKind : std::uint8_t {
    identifier,
    keyword,
    string,
    integer,
    floating,
    symbol,
    newline,
    end,
};

struct Token {
    TokenKind kind = TokenKind::end;
    std::string text;  // identifier name, keyword, decoded string, symbol or number text
    SourceSpan span;
    std::int64_t int_value = 0;
    double float_value = 0;
};

/// Splits source into tokens. Statement separators (newline, `;`) become
/// `newline` tokens except inside parentheses. Throws ParseError for bad
/// characters, unterminated strings and out-of-range numbers.
[[nodiscard]] std::vector<Token> tokenize(std::string_view source);

}  // namespace liveprof::dsl
