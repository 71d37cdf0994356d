#include "liveprof/exports.hpp"

#include "liveprof/dsl/parser.hpp"

#include <cmath>

namespace liveprof {

namespace {

using dsl::quote_identifier;

const Column& require(const Session& session, const std::string& table, const std::string& column) {
    const TablePtr t = session.find(table);
    if (!t) throw ExportError("UnknownTable", "unknown table '" + table + "'");
    const Column* c = t->find(column);
    if (!c) throw ExportError("UnknownColumn", "table '" + table + "' has no column '" + column + "'");
    return *c;
}

/// `{table}{suffix}`, or the first of `_2`, `_3`, ... appended to it that is
/// not already bound.
std::string fresh_name(const Session& session, const std::string& table, std::string_view suffix) {
    const std::string base = table + std::string(suffix);
    if (!session.find(base)) return base;
    for (std::size_t i = 2;; ++i) {
        std::string candidate = base + "_" + std::to_string(i);
        if (!session.find(candidate)) return candidate;
    }
}

Snippet filter_snippet(const Session& session, const std::string& table, std::string_view suffix,
                       const std::string& condition) {
    Snippet s;
    s.new_name = fresh_name(session, table, suffix);
    s.text = quote_identifier(s.new_name) + " = filter " + quote_identifier(table) + " where " + condition;
    return s;
}

}  // namespace

Snippet export_categorical_selection(const Session& session, const std::string& table, const std::string& column,
                                     const std::optional<std::string>& value) {
    const Column& c = require(session, table, column);
    if (c.stype != SemanticType::categorical && c.stype != SemanticType::boolean) {
        throw ExportError("InvalidColumnType", "column '" + column + "' is not categorical or boolean");
    }
    const std::string col = quote_identifier(column);
    const std::string condition = value ? col + " == " + dsl::quote_string(*value) : "isnull(" + col + ")";
    return filter_snippet(session, table, "_sel", condition);
}

Snippet export_numeric_range(const Session& session, const std::string& table, const std::string& column, double lo,
                             double hi, bool last_bin) {
    const Column& c = require(session, table, column);
    if (!is_numeric(c.stype)) throw ExportError("InvalidColumnType", "column '" + column + "' is not numeric");
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
        throw ExportError("InvalidRange", "invalid range [" + dsl::number_literal(lo) + ", " +
                                              dsl::number_literal(hi) + "]");
    }
    const std::string col = quote_identifier(column);
    const bool closed = last_bin || lo == hi;
    const std::string condition = col + " >= " + dsl::number_literal(lo) + " and " + col + (closed ? " <= " : " < ") +
                                  dsl::number_literal(hi);
    return filter_snippet(session, table, "_sel", condition);
}

Snippet export_outlier_template(const Session& session, const std::string& table, const std::string& column,
                                OutlierMethod method) {
    const Column& c = require(session, table, column);
    if (!is_numeric(c.stype)) throw ExportError("InvalidColumnType", "column '" + column + "' is not numeric");
    const std::string col = quote_identifier(column);
    const std::string ref = quote_identifier(table) + "." + col;
    std::string condition;
    if (method == OutlierMethod::sigma) {
        condition = col + " < mean(" + ref + ") - 3 * std(" + ref + ") or " + col + " > mean(" + ref + ") + 3 * std(" +
                    ref + ")";
    } else {
        condition = col + " < quantile(" + ref + ", 0.25) - 1.5 * iqr(" + ref + ") or " + col + " > quantile(" + ref +
                    ", 0.75) + 1.5 * iqr(" + ref + ")";
    }
    return filter_snippet(session, table, "_out", condition);
}

Snippet export_duplicates_template(const Session& session, const std::string& table, const std::string& column) {
    require(session, table, column);
    return filter_snippet(session, table, "_dups", "duplicated(" + quote_identifier(column) + ")");
}

Snippet export_plot_template(const Session& session, const std::string& table, const std::string& column) {
    const Column& c = require(session, table, column);
    std::string_view kind = "topk";
    if (is_numeric(c.stype)) kind = "histogram";
    if (c.stype == SemanticType::temporal) kind = "timeline";
    return {"plot " + quote_identifier(table) + "." + quote_identifier(column) + " as " + std::string(kind), ""};
}

Snippet generate_export(const Session& session, const ExportRequest& request) {
    const auto& t = request.table;
    const auto& c = request.column;
    if (const auto* sel = std::get_if<CategoricalSelection>(&request.params)) {
        return export_categorical_selection(session, t, c, sel->value);
    }
    if (const auto* range = std::get_if<NumericRangeSelection>(&request.params)) {
        return export_numeric_range(session, t, c, range->lo, range->hi, range->last_bin);
    }
    if (const auto* out = std::get_if<OutlierTemplate>(&request.params)) {
        return export_outlier_template(session, t, c, out->method);
    }
    if (std::holds_alternative<DuplicatesTemplate>(request.params)) return export_duplicates_template(session, t, c);
    return export_plot_template(session, t, c);
}

}  // namespace liveprof
