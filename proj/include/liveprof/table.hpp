#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace liveprof {

/// Profiling-oriented classification of a column. Boolean columns share the
/// categorical profile layout.
enum class SemanticType : std::uint8_t { boolean, integer, float_, temporal, categorical };

[[nodiscard]] std::string_view to_string(SemanticType t) noexcept;
[[nodiscard]] std::optional<SemanticType> semantic_type_from_string(std::string_view s) noexcept;

[[nodiscard]] constexpr bool is_numeric(SemanticType t) noexcept {
    return t == SemanticType::integer || t == SemanticType::float_;
}

/// UTC instant in milliseconds since the Unix epoch.
struct Timestamp {
    std::int64_t epoch_ms = 0;

    auto operator<=>(const Timestamp&) const = default;
};

struct Null {
    bool operator==(const Null&) const = default;
};

/// One table cell. The alternative in use always matches the owning column's
/// SemanticType, or is Null.
using Cell = std::variant<Null, bool, std::int64_t, double, std::string, Timestamp>;

[[nodiscard]] inline bool is_null(const Cell& c) noexcept { return std::holds_alternative<Null>(c); }

/// True when `c` is null or holds the alternative that `t` requires.
[[nodiscard]] bool conforms(const Cell& c, SemanticType t) noexcept;

/// Shortest round-trip rendering of a double. Integral values keep a trailing
/// ".0" so they re-read as floats.
[[nodiscard]] std::string format_double(double v);

/// `YYYY-MM-DD` at midnight, otherwise `YYYY-MM-DDTHH:MM:SSZ` (with `.mmm`
/// when the instant has a millisecond part).
[[nodiscard]] std::string format_timestamp(Timestamp ts);

/// Text rendering used by str(), categorical profiles and CSV output. Null
/// renders as the empty string.
[[nodiscard]] std::string render_cell(const Cell& c);

struct Column {
    std::string name;
    SemanticType stype = SemanticType::categorical;
    std::vector<Cell> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] std::size_t null_count() const noexcept;

    bool operator==(const Column&) const = default;
};

/// Named columnar dataset. Immutable once constructed; transforms build new
/// tables.
class Table {
public:
    Table() = default;

    /// Throws SchemaError when column lengths differ, names repeat, or a cell
    /// does not conform to its column's type.
    Table(std::string name, std::vector<Column> columns);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<Column>& columns() const noexcept { return columns_; }
    [[nodiscard]] std::size_t nrows() const noexcept { return nrows_; }
    [[nodiscard]] std::size_t ncols() const noexcept { return columns_.size(); }

    [[nodiscard]] const Column* find(std::string_view column) const noexcept;
    [[nodiscard]] const Column& column(std::string_view column) const;

    [[nodiscard]] Table renamed(std::string name) const;

    bool operator==(const Table&) const = default;

private:
    std::string name_;
    std::vector<Column> columns_;
    std::size_t nrows_ = 0;
};

using TablePtr = std::shared_ptr<const Table>;

}  // namespace liveprof
