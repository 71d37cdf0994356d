#include "liveprof/table.hpp"

#include "liveprof/error.hpp"
#include "liveprof/tokens.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace liveprof {

std::string_view to_string(SemanticType t) noexcept {
    switch (t) {
        case SemanticType::boolean: return "boolean";
        case SemanticType::integer: return "integer";
        case SemanticType::float_: return "float";
        case SemanticType::temporal: return "temporal";
        case SemanticType::categorical: return "categorical";
    }
    return "categorical";
}

std::optional<SemanticType> semantic_type_from_string(std::string_view s) noexcept {
    if (s == "boolean") return SemanticType::boolean;
    if (s == "integer") return SemanticType::integer;
    if (s == "float") return SemanticType::float_;
    if (s == "temporal") return SemanticType::temporal;
    if (s == "categorical") return SemanticType::categorical;
    return std::nullopt;
}

bool conforms(const Cell& c, SemanticType t) noexcept {
    switch (t) {
        case SemanticType::boolean: return is_null(c) || std::holds_alternative<bool>(c);
        case SemanticType::integer: return is_null(c) || std::holds_alternative<std::int64_t>(c);
        case SemanticType::float_:
            return is_null(c) ||
                   (std::holds_alternative<double>(c) && std::isfinite(std::get<double>(c)));
        case SemanticType::temporal: return is_null(c) || std::holds_alternative<Timestamp>(c);
        case SemanticType::categorical: return is_null(c) || std::holds_alternative<std::string>(c);
    }
    return false;
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string out(buf, end);
    if (std::isfinite(v) && out.find_first_of(".eE") == std::string::npos) out += ".0";
    return out;
}

std::string format_timestamp(Timestamp ts) {
    const std::int64_t ms_per_day = 86'400'000;
    std::int64_t days = ts.epoch_ms / ms_per_day;
    std::int64_t rem = ts.epoch_ms % ms_per_day;
    if (rem < 0) {
        rem += ms_per_day;
        --days;
    }
    const CivilDate d = civil_from_days(days);
    char buf[48];
    if (rem == 0) {
        std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u", static_cast<long long>(d.year), d.month, d.day);
        return buf;
    }
    const auto ms = static_cast<unsigned>(rem % 1000);
    const auto secs = rem / 1000;
    const auto hh = static_cast<unsigned>(secs / 3600);
    const auto mm = static_cast<unsigned>((secs / 60) % 60);
    const auto ss = static_cast<unsigned>(secs % 60);
    if (ms == 0) {
        std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02u:%02u:%02uZ", static_cast<long long>(d.year),
                      d.month, d.day, hh, mm, ss);
    } else {
        std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02u:%02u:%02u.%03uZ",
                      static_cast<long long>(d.year), d.month, d.day, hh, mm, ss, ms);
    }
    return buf;
}

std::string render_cell(const Cell& c) {
    struct Visitor {
        std::string operator()(Null) const { return {}; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(Timestamp t) const { return format_timestamp(t); }
    };
    return std::visit(Visitor{}, c);
}

std::size_t Column::null_count() const noexcept {
    std::size_t n = 0;
    for (const auto& v : values) n += is_null(v) ? 1 : 0;
    return n;
}

Table::Table(std::string name, std::vector<Column> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {
    nrows_ = columns_.empty() ? 0 : columns_.front().size();
    std::unordered_set<std::string_view> seen;
    for (const auto& col : columns_) {
        if (col.size() != nrows_) {
            throw Error("SchemaError", "column '" + col.name + "' has " + std::to_string(col.size()) +
                                           " rows, expected " + std::to_string(nrows_));
        }
        if (!seen.insert(col.name).second) {
            throw Error("SchemaError", "duplicate column name '" + col.name + "'");
        }
        for (const auto& cell : col.values) {
            if (!conforms(cell, col.stype)) {
                throw Error("SchemaError", "column '" + col.name + "' holds a value that is not " +
                                               std::string(to_string(col.stype)));
            }
        }
    }
}

const Column* Table::find(std::string_view column) const noexcept {
    for (const auto& c : columns_) {
        if (c.name == column) return &c;
    }
    return nullptr;
}

const Column& Table::column(std::string_view column) const {
    if (const auto* c = find(column)) return *c;
    throw NameError(std::string(column));
}

Table Table::renamed(std::string name) const {
    Table copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

}  // namespace liveprof
