#pragma once

#include "liveprof/dsl/ast.hpp"
#include "liveprof/session.hpp"
#include "liveprof/table.hpp"

#include <functional>
#include <string_view>
#include <vector>

namespace liveprof::detail {

/// Resolves a table name for table references and aggregates. Returns null
/// for unknown names.
using TableLookup = std::function<TablePtr(std::string_view)>;

/// Evaluates a table expression. The result is unnamed; inputs are never
/// modified.
[[nodiscard]] TablePtr eval_table(const dsl::TableExpr& expr, const TableLookup& lookup);

/// Converts cells of type `from` to `target`. `span` is attached to errors.
[[nodiscard]] std::vector<Cell> cast_cells(const std::vector<Cell>& cells, SemanticType from, CastTarget target,
                                           CastMode mode, SourceSpan span = {});

}  // namespace liveprof::detail
