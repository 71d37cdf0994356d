#pragma once

#include "liveprof/session.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace liveprof {

/// DSL source generated from a UI selection or template button, ready to be
/// inserted into the console. Never executed by the generator.
struct Snippet {
    std::string text;
    /// Binding the snippet introduces; empty for plot templates.
    std::string new_name;

    bool operator==(const Snippet&) const = default;
};

enum class OutlierMethod : std::uint8_t { sigma, iqr };

struct CategoricalSelection {
    std::optional<std::string> value;  // nullopt selects null cells
};
struct NumericRangeSelection {
    double lo = 0;
    double hi = 0;
    bool last_bin = false;
};
struct OutlierTemplate {
    OutlierMethod method = OutlierMethod::sigma;
};
struct DuplicatesTemplate {};
struct PlotTemplate {};

struct ExportRequest {
    std::string table;
    std::string column;
    std::variant<CategoricalSelection, NumericRangeSelection, OutlierTemplate, DuplicatesTemplate, PlotTemplate>
        params;
};

/// Raised for unknown tables/columns ("UnknownTable", "UnknownColumn"), bad
/// ranges ("InvalidRange") and column types the export does not support
/// ("InvalidColumnType").
class ExportError : public Error {
public:
    using Error::Error;
};

/// `{t}_sel = filter {t} where {c} == "{value}"`, or `isnull({c})` for a null
/// selection. Column must be categorical or boolean.
[[nodiscard]] Snippet export_categorical_selection(const Session& session, const std::string& table,
                                                   const std::string& column, const std::optional<std::string>& value);

/// `{t}_sel = filter {t} where {c} >= lo and {c} < hi`; the last bin and a
/// degenerate bin use `<= hi`.
[[nodiscard]] Snippet export_numeric_range(const Session& session, const std::string& table,
                                           const std::string& column, double lo, double hi, bool last_bin);

[[nodiscard]] Snippet export_outlier_template(const Session& session, const std::string& table,
                                              const std::string& column, OutlierMethod method);

[[nodiscard]] Snippet export_duplicates_template(const Session& session, const std::string& table,
                                                 const std::string& column);

/// `plot {t}.{c} as histogram|topk|timeline`, chosen by column type.
[[nodiscard]] Snippet export_plot_template(const Session& session, const std::string& table,
                                           const std::string& column);

/// Dispatches on the request kind.
[[nodiscard]] Snippet generate_export(const Session& session, const ExportRequest& request);

}  // namespace liveprof
