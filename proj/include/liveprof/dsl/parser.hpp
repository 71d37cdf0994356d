#pragma once

#include "liveprof/dsl/ast.hpp"

#include <string>
#include <string_view>

namespace liveprof::dsl {

/// Parses a whole program. Statements are separated by newlines or `;`;
/// newlines inside parentheses are ignored and `#` starts a comment.
/// Throws ParseError (1-based line/column, expected-token set) on the first
/// syntax error; nothing is returned for a partially valid program.
[[nodiscard]] Program parse(std::string_view source);

/// True for words the grammar reserves (`filter`, `where`, `and`, ...).
[[nodiscard]] bool is_reserved(std::string_view word) noexcept;

/// True when `name` can appear unquoted: [A-Za-z_][A-Za-z0-9_]* and not
/// reserved.
[[nodiscard]] bool is_plain_identifier(std::string_view name) noexcept;

/// `name` as written in source: unchanged when plain, otherwise wrapped in
/// backticks (a literal backtick is doubled).
[[nodiscard]] std::string quote_identifier(std::string_view name);

/// Double-quoted string literal with backslash escapes.
[[nodiscard]] std::string quote_string(std::string_view value);

/// Shortest literal that the lexer reads back as exactly `v`.
[[nodiscard]] std::string number_literal(double v);

}  // namespace liveprof::dsl
