#include "eval.hpp"

#include "liveprof/error.hpp"
#include "liveprof/profile.hpp"
#include "liveprof/tokens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace liveprof::detail {

namespace {

using namespace dsl;

/// Intermediate expression value: a full column or a scalar broadcast to
/// every row.
struct Vec {
    SemanticType type = SemanticType::categorical;
    bool scalar = false;
    std::vector<Cell> cells;

    [[nodiscard]] const Cell& at(std::size_t i) const { return scalar ? cells.front() : cells[i]; }
};

Vec scalar_of(SemanticType type, Cell value) { return {type, true, {std::move(value)}}; }

SemanticType type_of_literal(const Cell& c) {
    if (std::holds_alternative<std::int64_t>(c)) return SemanticType::integer;
    if (std::holds_alternative<double>(c)) return SemanticType::float_;
    if (std::holds_alternative<bool>(c)) return SemanticType::boolean;
    if (std::holds_alternative<Timestamp>(c)) return SemanticType::temporal;
    return SemanticType::categorical;
}

double as_double(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    return std::get<double>(c);
}

std::string type_name(SemanticType t) { return std::string(to_string(t)); }

/// Three-way comparison of two non-null cells of the same comparable kind.
int compare_cells(const Cell& a, const Cell& b) {
    if ((std::holds_alternative<std::int64_t>(a) || std::holds_alternative<double>(a)) &&
        (std::holds_alternative<std::int64_t>(b) || std::holds_alternative<double>(b))) {
        const double x = as_double(a);
        const double y = as_double(b);
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    if (const auto* s = std::get_if<std::string>(&a)) {
        const int r = s->compare(std::get<std::string>(b));
        return r < 0 ? -1 : (r > 0 ? 1 : 0);
    }
    if (const auto* v = std::get_if<bool>(&a)) {
        const bool w = std::get<bool>(b);
        return *v == w ? 0 : (*v ? 1 : -1);
    }
    const auto x = std::get<Timestamp>(a);
    const auto y = std::get<Timestamp>(b);
    return x < y ? -1 : (x > y ? 1 : 0);
}

/// Key used to group equal values (duplicated, dedupe). Distinguishes null
/// from every rendered value.
std::string group_key(const Cell& c) {
    if (is_null(c)) return std::string(1, '\0');
    return "v" + render_cell(c);
}

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (char c : s) n += (static_cast<unsigned char>(c) & 0xC0) != 0x80 ? 1 : 0;
    return n;
}

class ExprEvaluator {
public:
    ExprEvaluator(const Table& table, const TableLookup& lookup) : table_(table), lookup_(lookup) {}

    Vec eval(const Expr& e) {
        return std::visit([&](const auto& node) { return eval_node(node, e.span); }, e.node);
    }

private:
    [[nodiscard]] std::size_t rows() const noexcept { return table_.nrows(); }

    Vec eval_node(const Literal& lit, SourceSpan) { return scalar_of(type_of_literal(lit.value), lit.value); }

    Vec eval_node(const ColumnRef& ref, SourceSpan) {
        const Column* col = table_.find(ref.column.name);
        if (!col) throw NameError(ref.column.name, ref.column.span);
        return {col->stype, false, col->values};
    }

    Vec eval_node(const Unary& u, SourceSpan span) {
        Vec v = eval(*u.operand);
        if (u.op == UnaryOp::logical_not) {
            if (v.type != SemanticType::boolean) throw TypeError("'not' needs a boolean operand, got " + type_name(v.type), span);
            for (auto& c : v.cells) {
                if (const auto* b = std::get_if<bool>(&c)) c = !*b;
            }
            return v;
        }
        if (!is_numeric(v.type)) throw TypeError("cannot negate " + type_name(v.type), span);
        for (auto& c : v.cells) {
            if (auto* i = std::get_if<std::int64_t>(&c)) {
                if (*i == std::numeric_limits<std::int64_t>::min()) throw TypeError("integer overflow", span);
                *i = -*i;
            } else if (auto* d = std::get_if<double>(&c)) {
                *d = -*d;
            }
        }
        return v;
    }

    Vec eval_node(const Binary& b, SourceSpan span) {
        Vec lhs = eval(*b.lhs);
        Vec rhs = eval(*b.rhs);
        switch (b.op) {
            case BinaryOp::add:
            case BinaryOp::sub:
            case BinaryOp::mul:
            case BinaryOp::div: return arithmetic(b.op, lhs, rhs, span);
            case BinaryOp::logical_and:
            case BinaryOp::logical_or: return logical(b.op, lhs, rhs, span);
            default: return comparison(b.op, std::move(lhs), std::move(rhs), span);
        }
    }

    Vec arithmetic(BinaryOp op, const Vec& lhs, const Vec& rhs, SourceSpan span) {
        if (!is_numeric(lhs.type) || !is_numeric(rhs.type)) {
            throw TypeError("operator '" + std::string(to_string(op)) + "' needs numeric operands, got " +
                                type_name(lhs.type) + " and " + type_name(rhs.type),
                            span);
        }
        const bool int_result =
            op != BinaryOp::div && lhs.type == SemanticType::integer && rhs.type == SemanticType::integer;
        Vec out{int_result ? SemanticType::integer : SemanticType::float_, lhs.scalar && rhs.scalar, {}};
        const std::size_t n = out.scalar ? 1 : rows();
        out.cells.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Cell& a = lhs.at(i);
            const Cell& c = rhs.at(i);
            if (is_null(a) || is_null(c)) {
                out.cells.emplace_back(Null{});
                continue;
            }
            if (int_result) {
                const std::int64_t x = std::get<std::int64_t>(a);
                const std::int64_t y = std::get<std::int64_t>(c);
                std::int64_t r = 0;
                bool overflow = false;
                switch (op) {
                    case BinaryOp::add: overflow = __builtin_add_overflow(x, y, &r); break;
                    case BinaryOp::sub: overflow = __builtin_sub_overflow(x, y, &r); break;
                    default: overflow = __builtin_mul_overflow(x, y, &r); break;
                }
                if (overflow) throw TypeError("integer overflow", span);
                out.cells.emplace_back(r);
                continue;
            }
            const double x = as_double(a);
            const double y = as_double(c);
            double r = 0;
            switch (op) {
                case BinaryOp::add: r = x + y; break;
                case BinaryOp::sub: r = x - y; break;
                case BinaryOp::mul: r = x * y; break;
                default: r = y == 0.0 ? std::numeric_limits<double>::quiet_NaN() : x / y; break;
            }
            if (std::isfinite(r)) {
                out.cells.emplace_back(r);
            } else {
                out.cells.emplace_back(Null{});
            }
        }
        return out;
    }

    Vec logical(BinaryOp op, const Vec& lhs, const Vec& rhs, SourceSpan span) {
        if (lhs.type != SemanticType::boolean || rhs.type != SemanticType::boolean) {
            throw TypeError("'" + std::string(to_string(op)) + "' needs boolean operands, got " +
                                type_name(lhs.type) + " and " + type_name(rhs.type),
                            span);
        }
        Vec out{SemanticType::boolean, lhs.scalar && rhs.scalar, {}};
        const std::size_t n = out.scalar ? 1 : rows();
        out.cells.reserve(n);
        const auto truthy = [](const Cell& c) {
            const auto* b = std::get_if<bool>(&c);
            return b && *b;
        };
        for (std::size_t i = 0; i < n; ++i) {
            const bool x = truthy(lhs.at(i));
            const bool y = truthy(rhs.at(i));
            out.cells.emplace_back(op == BinaryOp::logical_and ? (x && y) : (x || y));
        }
        return out;
    }

    /// Brings both operands to one comparable kind or throws TypeError.
    void unify_for_comparison(Vec& lhs, Vec& rhs, SourceSpan span) {
        const auto to_text = [](Vec& v) {
            for (auto& c : v.cells) {
                if (!is_null(c)) c = render_cell(c);
            }
            v.type = SemanticType::categorical;
        };
        const auto to_time = [&](Vec& v) {
            if (!v.scalar) throw TypeError("cannot compare temporal with a categorical column", span);
            Cell& c = v.cells.front();
            if (!is_null(c)) {
                auto ts = parse_timestamp(std::get<std::string>(c));
                if (!ts) throw TypeError("'" + std::get<std::string>(c) + "' is not a date", span);
                c = *ts;
            }
            v.type = SemanticType::temporal;
        };
        if (is_numeric(lhs.type) && is_numeric(rhs.type)) return;
        if (lhs.type == rhs.type) return;
        if (lhs.type == SemanticType::boolean && rhs.type == SemanticType::categorical) return to_text(lhs);
        if (rhs.type == SemanticType::boolean && lhs.type == SemanticType::categorical) return to_text(rhs);
        if (lhs.type == SemanticType::temporal && rhs.type == SemanticType::categorical) return to_time(rhs);
        if (rhs.type == SemanticType::temporal && lhs.type == SemanticType::categorical) return to_time(lhs);
        throw TypeError("cannot compare " + type_name(lhs.type) + " with " + type_name(rhs.type), span);
    }

    Vec comparison(BinaryOp op, Vec lhs, Vec rhs, SourceSpan span) {
        unify_for_comparison(lhs, rhs, span);
        Vec out{SemanticType::boolean, lhs.scalar && rhs.scalar, {}};
        const std::size_t n = out.scalar ? 1 : rows();
        out.cells.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Cell& a = lhs.at(i);
            const Cell& b = rhs.at(i);
            if (is_null(a) || is_null(b)) {
                out.cells.emplace_back(false);
                continue;
            }
            const int r = compare_cells(a, b);
            bool v = false;
            switch (op) {
                case BinaryOp::eq: v = r == 0; break;
                case BinaryOp::ne: v = r != 0; break;
                case BinaryOp::lt: v = r < 0; break;
                case BinaryOp::le: v = r <= 0; break;
                case BinaryOp::gt: v = r > 0; break;
                default: v = r >= 0; break;
            }
            out.cells.emplace_back(v);
        }
        return out;
    }

    Vec eval_node(const Call& call, SourceSpan span) {
        const std::string& fn = call.function.name;
        Vec arg = eval(*call.args.front());
        if (fn == "isnull") {
            for (auto& c : arg.cells) c = is_null(c);
            arg.type = SemanticType::boolean;
            return arg;
        }
        if (fn == "duplicated") {
            std::vector<Cell> cells = arg.scalar ? std::vector<Cell>(rows(), arg.cells.front()) : arg.cells;
            std::unordered_map<std::string, std::size_t> counts;
            std::vector<std::string> keys;
            keys.reserve(cells.size());
            for (const auto& c : cells) ++counts[keys.emplace_back(group_key(c))];
            Vec out{SemanticType::boolean, false, {}};
            out.cells.reserve(cells.size());
            for (const auto& k : keys) out.cells.emplace_back(counts[k] > 1);
            return out;
        }
        if (fn == "str") {
            for (auto& c : arg.cells) {
                if (!is_null(c)) c = render_cell(c);
            }
            arg.type = SemanticType::categorical;
            return arg;
        }
        if (fn == "upper" || fn == "lower" || fn == "len") {
            if (arg.type != SemanticType::categorical) {
                throw TypeError(fn + "() needs a categorical operand, got " + type_name(arg.type), span);
            }
            for (auto& c : arg.cells) {
                auto* s = std::get_if<std::string>(&c);
                if (!s) continue;
                if (fn == "len") {
                    c = static_cast<std::int64_t>(utf8_length(*s));
                    continue;
                }
                for (char& ch : *s) {
                    if (fn == "upper" && ch >= 'a' && ch <= 'z') ch = static_cast<char>(ch - 'a' + 'A');
                    if (fn == "lower" && ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
                }
            }
            if (fn == "len") arg.type = SemanticType::integer;
            return arg;
        }

        const bool coercing = fn.starts_with("try_");
        const std::string_view base = coercing ? std::string_view(fn).substr(4) : std::string_view(fn);
        const CastTarget target = base == "int"     ? CastTarget::integer
                                  : base == "float" ? CastTarget::float_
                                                    : CastTarget::temporal;
        Vec out{SemanticType::integer, arg.scalar, {}};
        out.type = target == CastTarget::integer ? SemanticType::integer
                   : target == CastTarget::float_ ? SemanticType::float_
                                                  : SemanticType::temporal;
        out.cells = cast_cells(arg.cells, arg.type, target, coercing ? CastMode::coercing : CastMode::strict, span);
        return out;
    }

    Vec eval_node(const Aggregate& agg, SourceSpan span) {
        const TablePtr source = lookup_(agg.table.name);
        if (!source) throw NameError(agg.table.name, agg.table.span);
        const Column* col = source->find(agg.column.name);
        if (!col) throw NameError(agg.table.name + "." + agg.column.name, agg.column.span);
        if (!is_numeric(col->stype)) {
            throw TypeError(agg.function.name + "() needs a numeric column, '" + agg.column.name + "' is " +
                                type_name(col->stype),
                            span);
        }
        const NumericValues nv = numeric_values(*col);
        if (nv.values.empty()) return scalar_of(SemanticType::float_, Null{});

        const std::string& fn = agg.function.name;
        if (fn == "mean") return scalar_of(SemanticType::float_, moments(nv.values).mean);
        if (fn == "std") return scalar_of(SemanticType::float_, moments(nv.values).std);

        std::vector<double> sorted = nv.values;
        std::sort(sorted.begin(), sorted.end());
        double v = 0;
        if (fn == "min") {
            v = sorted.front();
        } else if (fn == "max") {
            v = sorted.back();
        } else if (fn == "median") {
            v = quantile(sorted, 0.5);
        } else if (fn == "iqr") {
            const Quartiles q = quartiles(sorted);
            v = q.q3 - q.q1;
        } else {
            v = quantile(sorted, *agg.probability);
        }
        return scalar_of(SemanticType::float_, v);
    }

    const Table& table_;
    const TableLookup& lookup_;
};

Table take_rows(const Table& t, const std::vector<std::size_t>& rows) {
    std::vector<Column> cols;
    cols.reserve(t.ncols());
    for (const auto& c : t.columns()) {
        Column out{c.name, c.stype, {}};
        out.values.reserve(rows.size());
        for (std::size_t r : rows) out.values.push_back(c.values[r]);
        cols.push_back(std::move(out));
    }
    return Table({}, std::move(cols));
}

const Column& require_column(const Table& t, const Ident& id) {
    const Column* c = t.find(id.name);
    if (!c) throw NameError(id.name, id.span);
    return *c;
}

class TableEvaluator {
public:
    explicit TableEvaluator(const TableLookup& lookup) : lookup_(lookup) {}

    TablePtr eval(const TableExpr& e) {
        return std::visit([&](const auto& node) { return eval_node(node, e.span); }, e.node);
    }

private:
    TablePtr eval_node(const TableRef& ref, SourceSpan) {
        TablePtr t = lookup_(ref.name.name);
        if (!t) throw NameError(ref.name.name, ref.name.span);
        return t;
    }

    TablePtr eval_node(const Filter& f, SourceSpan span) {
        const TablePtr input = eval(*f.input);
        const Vec cond = ExprEvaluator(*input, lookup_).eval(*f.condition);
        if (cond.type != SemanticType::boolean) {
            throw TypeError("filter condition must be boolean, got " + type_name(cond.type), span);
        }
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < input->nrows(); ++i) {
            const auto* b = std::get_if<bool>(&cond.at(i));
            if (b && *b) rows.push_back(i);
        }
        return std::make_shared<const Table>(take_rows(*input, rows));
    }

    TablePtr eval_node(const Select& s, SourceSpan span) {
        const TablePtr input = eval(*s.input);
        std::vector<Column> cols;
        std::unordered_set<std::string> seen;
        for (const auto& id : s.columns) {
            if (!seen.insert(id.name).second) throw TypeError("column '" + id.name + "' selected twice", span);
            cols.push_back(require_column(*input, id));
        }
        return std::make_shared<const Table>(Table({}, std::move(cols)));
    }

    TablePtr eval_node(const Drop& d, SourceSpan) {
        const TablePtr input = eval(*d.input);
        std::unordered_set<std::string> dropped;
        for (const auto& id : d.columns) {
            require_column(*input, id);
            dropped.insert(id.name);
        }
        std::vector<Column> cols;
        for (const auto& c : input->columns()) {
            if (!dropped.contains(c.name)) cols.push_back(c);
        }
        return std::make_shared<const Table>(Table({}, std::move(cols)));
    }

    TablePtr eval_node(const Mutate& m, SourceSpan) {
        const TablePtr input = eval(*m.input);
        Vec v = ExprEvaluator(*input, lookup_).eval(*m.value);
        Column out{m.column.name, v.type, {}};
        if (v.scalar) {
            out.values.assign(input->nrows(), v.cells.front());
        } else {
            out.values = std::move(v.cells);
        }
        std::vector<Column> cols = input->columns();
        auto it = std::find_if(cols.begin(), cols.end(), [&](const Column& c) { return c.name == m.column.name; });
        if (it != cols.end()) {
            *it = std::move(out);
        } else {
            cols.push_back(std::move(out));
        }
        return std::make_shared<const Table>(Table({}, std::move(cols)));
    }

    TablePtr eval_node(const DropNa& d, SourceSpan) {
        const TablePtr input = eval(*d.input);
        std::vector<const Column*> checked;
        if (d.columns.empty()) {
            for (const auto& c : input->columns()) checked.push_back(&c);
        } else {
            for (const auto& id : d.columns) checked.push_back(&require_column(*input, id));
        }
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < input->nrows(); ++i) {
            const bool any_null =
                std::any_of(checked.begin(), checked.end(), [&](const Column* c) { return is_null(c->values[i]); });
            if (!any_null) rows.push_back(i);
        }
        return std::make_shared<const Table>(take_rows(*input, rows));
    }

    TablePtr eval_node(const Dedupe& d, SourceSpan) {
        const TablePtr input = eval(*d.input);
        std::vector<const Column*> keys;
        if (d.by.empty()) {
            for (const auto& c : input->columns()) keys.push_back(&c);
        } else {
            for (const auto& id : d.by) keys.push_back(&require_column(*input, id));
        }
        std::unordered_set<std::string> seen;
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < input->nrows(); ++i) {
            std::string key;
            for (const Column* c : keys) {
                const std::string part = group_key(c->values[i]);
                key += std::to_string(part.size());
                key += ':';
                key += part;
            }
            if (seen.insert(std::move(key)).second) rows.push_back(i);
        }
        return std::make_shared<const Table>(take_rows(*input, rows));
    }

    TablePtr eval_node(const Sort& s, SourceSpan) {
        const TablePtr input = eval(*s.input);
        const Column& key = require_column(*input, s.by);
        std::vector<std::size_t> rows(input->nrows());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
            const Cell& x = key.values[a];
            const Cell& y = key.values[b];
            if (is_null(x) || is_null(y)) return !is_null(x) && is_null(y);  // nulls last
            const int r = compare_cells(x, y);
            return s.descending ? r > 0 : r < 0;
        });
        return std::make_shared<const Table>(take_rows(*input, rows));
    }

    TablePtr eval_node(const Head& h, SourceSpan) {
        const TablePtr input = eval(*h.input);
        const auto n = std::min<std::size_t>(static_cast<std::size_t>(h.count), input->nrows());
        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = i;
        return std::make_shared<const Table>(take_rows(*input, rows));
    }

    const TableLookup& lookup_;
};

std::string_view target_name(CastTarget t) {
    switch (t) {
        case CastTarget::integer: return "integer";
        case CastTarget::float_: return "float";
        case CastTarget::temporal: return "date";
    }
    return "?";
}

}  // namespace

TablePtr eval_table(const TableExpr& expr, const TableLookup& lookup) { return TableEvaluator(lookup).eval(expr); }

std::vector<Cell> cast_cells(const std::vector<Cell>& cells, SemanticType from, CastTarget target, CastMode mode,
                             SourceSpan span) {
    const bool from_temporal = from == SemanticType::temporal;
    if ((target == CastTarget::temporal && from != SemanticType::categorical && !from_temporal) ||
        (target == CastTarget::float_ && from_temporal)) {
        throw TypeError("cannot convert " + type_name(from) + " to " + std::string(target_name(target)), span);
    }

    std::vector<Cell> out;
    out.reserve(cells.size());
    for (std::size_t row = 0; row < cells.size(); ++row) {
        const Cell& c = cells[row];
        if (is_null(c)) {
            out.emplace_back(Null{});
            continue;
        }
        std::optional<Cell> converted;
        switch (target) {
            case CastTarget::integer:
                if (const auto* i = std::get_if<std::int64_t>(&c)) {
                    converted = *i;
                } else if (const auto* d = std::get_if<double>(&c)) {
                    // 2^63 is the first double outside the int64 range.
                    if (std::trunc(*d) == *d && *d >= -9223372036854775808.0 && *d < 9223372036854775808.0) {
                        converted = static_cast<std::int64_t>(*d);
                    }
                } else if (const auto* b = std::get_if<bool>(&c)) {
                    converted = std::int64_t{*b ? 1 : 0};
                } else if (const auto* s = std::get_if<std::string>(&c)) {
                    if (auto v = parse_int(*s)) converted = *v;
                } else if (const auto* t = std::get_if<Timestamp>(&c)) {
                    converted = t->epoch_ms;
                }
                break;
            case CastTarget::float_:
                if (const auto* i = std::get_if<std::int64_t>(&c)) {
                    converted = static_cast<double>(*i);
                } else if (const auto* d = std::get_if<double>(&c)) {
                    converted = *d;
                } else if (const auto* b = std::get_if<bool>(&c)) {
                    converted = *b ? 1.0 : 0.0;
                } else if (const auto* s = std::get_if<std::string>(&c)) {
                    if (auto v = parse_float(*s)) converted = *v;
                }
                break;
            case CastTarget::temporal:
                if (const auto* t = std::get_if<Timestamp>(&c)) {
                    converted = *t;
                } else if (const auto* s = std::get_if<std::string>(&c)) {
                    if (auto v = parse_timestamp(*s)) converted = *v;
                }
                break;
        }
        if (converted) {
            out.push_back(std::move(*converted));
        } else if (mode == CastMode::coercing) {
            out.emplace_back(Null{});
        } else {
            throw CastError(row, "cannot convert '" + render_cell(c) + "' to " + std::string(target_name(target)) +
                                     " at row " + std::to_string(row + 1),
                            span);
        }
    }
    return out;
}

}  // namespace liveprof::detail
