#pragma once

#include "liveprof/error.hpp"
#include "liveprof/table.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace liveprof::dsl {

struct Ident {
    std::string name;
    SourceSpan span;
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class UnaryOp : std::uint8_t { negate, logical_not };
enum class BinaryOp : std::uint8_t { add, sub, mul, div, eq, ne, lt, le, gt, ge, logical_and, logical_or };

[[nodiscard]] std::string_view to_string(BinaryOp op) noexcept;

/// Integer, float, string or boolean constant.
struct Literal {
    Cell value;
};

/// Bare column name, resolved against the table being transformed.
struct ColumnRef {
    Ident column;
};

struct Unary {
    UnaryOp op;
    ExprPtr operand;
};

struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

/// Row-wise function: casts, string helpers, isnull, duplicated.
struct Call {
    Ident function;
    std::vector<ExprPtr> args;
};

/// Scalar aggregate over a named table's column, e.g. `mean(df.price)`.
/// `probability` is set only for quantile().
struct Aggregate {
    Ident function;
    Ident table;
    Ident column;
    std::optional<double> probability;
};

struct Expr {
    SourceSpan span;
    std::variant<Literal, ColumnRef, Unary, Binary, Call, Aggregate> node;
};

struct TableExpr;
using TableExprPtr = std::unique_ptr<TableExpr>;

struct TableRef {
    Ident name;
};
struct Filter {
    TableExprPtr input;
    ExprPtr condition;
};
struct Select {
    TableExprPtr input;
    std::vector<Ident> columns;
};
struct Drop {
    TableExprPtr input;
    std::vector<Ident> columns;
};
struct Mutate {
    TableExprPtr input;
    Ident column;
    ExprPtr value;
};
/// Empty `columns` means every column.
struct DropNa {
    TableExprPtr input;
    std::vector<Ident> columns;
};
/// Empty `by` means the whole row.
struct Dedupe {
    TableExprPtr input;
    std::vector<Ident> by;
};
struct Sort {
    TableExprPtr input;
    Ident by;
    bool descending = false;
};
struct Head {
    TableExprPtr input;
    std::int64_t count = 0;
};

struct TableExpr {
    SourceSpan span;
    std::variant<TableRef, Filter, Select, Drop, Mutate, DropNa, Dedupe, Sort, Head> node;
};

enum class PlotKind : std::uint8_t { histogram, topk, timeline };

[[nodiscard]] std::string_view to_string(PlotKind k) noexcept;

struct Load {
    std::string path;
    Ident target;
};
struct Assign {
    Ident target;
    TableExprPtr value;
};
/// A bare table expression; its value becomes the temporary output.
struct ExprStatement {
    TableExprPtr value;
};
struct Plot {
    Ident table;
    Ident column;
    PlotKind kind = PlotKind::histogram;
};

struct Statement {
    SourceSpan span;
    std::variant<Load, Assign, ExprStatement, Plot> node;
};

struct Program {
    std::vector<Statement> statements;
};

}  // namespace liveprof::dsl
