#pragma once

#include "liveprof/table.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace liveprof {

struct CsvOptions {
    char delimiter = ',';
    char quote = '"';
    /// Unquoted fields equal to one of these (exact, case-sensitive) are null.
    /// A quoted field is never null, so `""` is an empty string.
    std::vector<std::string> na_tokens = {"", "NA", "NaN", "null"};
};

/// All-or-nothing inference over the non-null tokens of one column, with
/// precedence boolean > integer > float > temporal > categorical. A column
/// with no non-null tokens is categorical.
[[nodiscard]] SemanticType infer_semantic_type(std::span<const std::optional<std::string>> raw);

/// Infers the column's type and converts every token to a typed cell.
[[nodiscard]] Column make_column(std::string name, std::span<const std::optional<std::string>> raw);

/// Parses CSV text with a mandatory header row. Throws CsvError with the
/// 1-based line of the offending record.
[[nodiscard]] Table parse_csv(std::string_view text, const CsvOptions& options = {},
                              std::string table_name = {});

/// Reads and parses a file. Throws IoError when it cannot be read.
[[nodiscard]] Table read_csv(const std::filesystem::path& path, const CsvOptions& options = {},
                             std::string table_name = {});

/// Writes `table` so that parse_csv with the same options reproduces it.
/// Strings are always quoted; nulls are empty unquoted fields.
void write_csv(const Table& table, std::ostream& out, const CsvOptions& options = {});
[[nodiscard]] std::string to_csv(const Table& table, const CsvOptions& options = {});

}  // namespace liveprof
