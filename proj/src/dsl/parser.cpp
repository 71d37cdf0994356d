#include "liveprof/dsl/parser.hpp"

#include "lexer.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace liveprof::dsl {

namespace {

constexpr std::array<std::string_view, 23> kReserved = {
    "load",  "as",    "filter", "where", "select", "cols", "drop", "mutate", "set",   "dropna", "dedupe", "by",
    "sort",  "asc",   "desc",   "head",  "plot",   "and",  "or",   "not",    "true",  "false",  "null"};

constexpr std::array<std::string_view, 7> kAggregates = {"mean", "std", "median", "min", "max", "iqr", "quantile"};

constexpr std::array<std::string_view, 12> kScalarFunctions = {
    "int", "float", "str", "date", "try_int", "try_float", "try_date", "upper", "lower", "len", "isnull", "duplicated"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& arr, std::string_view s) {
    return std::find(arr.begin(), arr.end(), s) != arr.end();
}

std::string describe(const Token& t) {
    switch (t.kind) {
        case TokenKind::end: return "end of input";
        case TokenKind::newline: return "end of statement";
        case TokenKind::string: return "string literal";
        case TokenKind::integer:
        case TokenKind::floating: return "number '" + t.text + "'";
        case TokenKind::identifier: return "identifier '" + t.text + "'";
        case TokenKind::keyword: return "keyword '" + t.text + "'";
        case TokenKind::symbol: return "'" + t.text + "'";
    }
    return "token";
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

const std::vector<std::string> kTableExprStart = {"identifier", "filter", "select", "drop", "mutate",
                                                  "dropna",     "dedupe", "sort",   "head", "("};
const std::vector<std::string> kExprStart = {"identifier", "number", "string", "true", "false", "(", "-", "not"};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Program program() {
        Program prog;
        skip_separators();
        while (!at(TokenKind::end)) {
            prog.statements.push_back(statement());
            if (!at(TokenKind::end) && !at(TokenKind::newline)) {
                error({"end of statement"});
            }
            skip_separators();
        }
        return prog;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    bool at(TokenKind k) const { return peek().kind == k; }
    bool at_keyword(std::string_view kw) const { return at(TokenKind::keyword) && peek().text == kw; }
    bool at_symbol(std::string_view s) const { return at(TokenKind::symbol) && peek().text == s; }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    void skip_separators() {
        while (at(TokenKind::newline)) take();
    }

    [[noreturn]] void error(std::vector<std::string> expected) const {
        const Token& t = peek();
        std::string msg = "unexpected " + describe(t);
        if (!expected.empty()) msg += ", expected " + join(expected);
        throw ParseError(msg, t.span, std::move(expected));
    }

    void expect_keyword(std::string_view kw) {
        if (!at_keyword(kw)) error({std::string(kw)});
        take();
    }

    void expect_symbol(std::string_view s) {
        if (!at_symbol(s)) error({std::string(s)});
        take();
    }

    Ident ident() {
        if (!at(TokenKind::identifier)) error({"identifier"});
        const Token& t = take();
        return {t.text, t.span};
    }

    std::vector<Ident> ident_list() {
        std::vector<Ident> out;
        out.push_back(ident());
        while (at_symbol(",")) {
            take();
            out.push_back(ident());
        }
        return out;
    }

    Statement statement() {
        Statement st;
        st.span = peek().span;
        if (at_keyword("load")) {
            take();
            if (!at(TokenKind::string)) error({"string"});
            Load load;
            load.path = take().text;
            expect_keyword("as");
            load.target = ident();
            st.node = std::move(load);
        } else if (at_keyword("plot")) {
            take();
            Plot plot;
            plot.table = ident();
            expect_symbol(".");
            plot.column = ident();
            expect_keyword("as");
            if (!at(TokenKind::identifier)) error({"histogram", "topk", "timeline"});
            const std::string& kind = peek().text;
            if (kind == "histogram") {
                plot.kind = PlotKind::histogram;
            } else if (kind == "topk") {
                plot.kind = PlotKind::topk;
            } else if (kind == "timeline") {
                plot.kind = PlotKind::timeline;
            } else {
                error({"histogram", "topk", "timeline"});
            }
            take();
            st.node = std::move(plot);
        } else if (at(TokenKind::identifier) && peek(1).kind == TokenKind::symbol && peek(1).text == "=") {
            Assign assign;
            assign.target = ident();
            take();
            assign.value = table_expr();
            st.node = std::move(assign);
        } else {
            st.node = ExprStatement{table_expr()};
        }
        return st;
    }

    TableExprPtr table_expr() {
        auto node = std::make_unique<TableExpr>();
        node->span = peek().span;
        if (at(TokenKind::identifier)) {
            node->node = TableRef{ident()};
            return node;
        }
        if (at_symbol("(")) {
            take();
            auto inner = table_expr();
            expect_symbol(")");
            return inner;
        }
        if (!at(TokenKind::keyword)) error(kTableExprStart);
        const std::string kw = peek().text;
        if (kw == "filter") {
            take();
            Filter f;
            f.input = table_expr();
            expect_keyword("where");
            f.condition = expr();
            node->node = std::move(f);
        } else if (kw == "select" || kw == "drop") {
            take();
            auto input = table_expr();
            expect_keyword("cols");
            auto cols = ident_list();
            if (kw == "select") {
                node->node = Select{std::move(input), std::move(cols)};
            } else {
                node->node = Drop{std::move(input), std::move(cols)};
            }
        } else if (kw == "mutate") {
            take();
            Mutate m;
            m.input = table_expr();
            expect_keyword("set");
            m.column = ident();
            expect_symbol("=");
            m.value = expr();
            node->node = std::move(m);
        } else if (kw == "dropna") {
            take();
            DropNa d;
            d.input = table_expr();
            if (at_keyword("cols")) {
                take();
                d.columns = ident_list();
            }
            node->node = std::move(d);
        } else if (kw == "dedupe") {
            take();
            Dedupe d;
            d.input = table_expr();
            if (at_keyword("by")) {
                take();
                d.by = ident_list();
            }
            node->node = std::move(d);
        } else if (kw == "sort") {
            take();
            Sort s;
            s.input = table_expr();
            expect_keyword("by");
            s.by = ident();
            if (at_keyword("asc")) {
                take();
            } else if (at_keyword("desc")) {
                take();
                s.descending = true;
            } else {
                error({"asc", "desc"});
            }
            node->node = std::move(s);
        } else if (kw == "head") {
            take();
            Head h;
            h.input = table_expr();
            if (!at(TokenKind::integer)) error({"integer"});
            h.count = take().int_value;
            node->node = std::move(h);
        } else {
            error(kTableExprStart);
        }
        return node;
    }

    ExprPtr make_expr(SourceSpan span, auto node) {
        auto e = std::make_unique<Expr>();
        e->span = span;
        e->node = std::move(node);
        return e;
    }

    ExprPtr expr() { return or_expr(); }

    ExprPtr or_expr() {
        auto lhs = and_expr();
        while (at_keyword("or")) {
            const SourceSpan span = take().span;
            auto rhs = and_expr();
            lhs = make_expr(span, Binary{BinaryOp::logical_or, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    ExprPtr and_expr() {
        auto lhs = not_expr();
        while (at_keyword("and")) {
            const SourceSpan span = take().span;
            auto rhs = not_expr();
            lhs = make_expr(span, Binary{BinaryOp::logical_and, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    ExprPtr not_expr() {
        if (at_keyword("not")) {
            const SourceSpan span = take().span;
            return make_expr(span, Unary{UnaryOp::logical_not, not_expr()});
        }
        return comparison();
    }

    ExprPtr comparison() {
        auto lhs = additive();
        static const std::pair<std::string_view, BinaryOp> kOps[] = {
            {"==", BinaryOp::eq}, {"!=", BinaryOp::ne}, {"<", BinaryOp::lt},
            {"<=", BinaryOp::le}, {">", BinaryOp::gt}, {">=", BinaryOp::ge}};
        if (at(TokenKind::symbol)) {
            for (const auto& [text, op] : kOps) {
                if (peek().text == text) {
                    const SourceSpan span = take().span;
                    auto rhs = additive();
                    return make_expr(span, Binary{op, std::move(lhs), std::move(rhs)});
                }
            }
        }
        return lhs;
    }

    ExprPtr additive() {
        auto lhs = multiplicative();
        while (at_symbol("+") || at_symbol("-")) {
            const Token& t = take();
            const BinaryOp op = t.text == "+" ? BinaryOp::add : BinaryOp::sub;
            auto rhs = multiplicative();
            lhs = make_expr(t.span, Binary{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    ExprPtr multiplicative() {
        auto lhs = unary();
        while (at_symbol("*") || at_symbol("/")) {
            const Token& t = take();
            const BinaryOp op = t.text == "*" ? BinaryOp::mul : BinaryOp::div;
            auto rhs = unary();
            lhs = make_expr(t.span, Binary{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    ExprPtr unary() {
        if (at_symbol("-")) {
            const SourceSpan span = take().span;
            return make_expr(span, Unary{UnaryOp::negate, unary()});
        }
        return primary();
    }

    ExprPtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::integer: take(); return make_expr(t.span, Literal{Cell{t.int_value}});
            case TokenKind::floating: take(); return make_expr(t.span, Literal{Cell{t.float_value}});
            case TokenKind::string: take(); return make_expr(t.span, Literal{Cell{t.text}});
            case TokenKind::keyword:
                if (t.text == "true" || t.text == "false") {
                    take();
                    return make_expr(t.span, Literal{Cell{t.text == "true"}});
                }
                break;
            case TokenKind::symbol:
                if (t.text == "(") {
                    take();
                    auto inner = expr();
                    expect_symbol(")");
                    return inner;
                }
                break;
            case TokenKind::identifier: {
                if (peek(1).kind == TokenKind::symbol && peek(1).text == "(") return call();
                Ident id = ident();
                const SourceSpan span = id.span;
                return make_expr(span, ColumnRef{std::move(id)});
            }
            default: break;
        }
        error(kExprStart);
    }

    ExprPtr call() {
        Ident fn = ident();
        const SourceSpan span = fn.span;
        take();  // "("
        if (contains(kAggregates, fn.name)) {
            Aggregate agg;
            agg.table = ident();
            expect_symbol(".");
            agg.column = ident();
            if (fn.name == "quantile") {
                expect_symbol(",");
                if (!at(TokenKind::integer) && !at(TokenKind::floating)) error({"number"});
                const Token& p = peek();
                const double prob = p.kind == TokenKind::integer ? static_cast<double>(p.int_value) : p.float_value;
                if (prob < 0.0 || prob > 1.0) {
                    throw ParseError("quantile probability must lie in [0, 1]", p.span, {"number"});
                }
                take();
                agg.probability = prob;
            }
            expect_symbol(")");
            agg.function = std::move(fn);
            return make_expr(span, std::move(agg));
        }
        if (!contains(kScalarFunctions, fn.name)) {
            std::vector<std::string> known;
            for (auto f : kAggregates) known.emplace_back(f);
            for (auto f : kScalarFunctions) known.emplace_back(f);
            throw ParseError("unknown function '" + fn.name + "'", fn.span, std::move(known));
        }
        Call c;
        c.function = std::move(fn);
        c.args.push_back(expr());
        expect_symbol(")");
        return make_expr(span, std::move(c));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(BinaryOp op) noexcept {
    switch (op) {
        case BinaryOp::add: return "+";
        case BinaryOp::sub: return "-";
        case BinaryOp::mul: return "*";
        case BinaryOp::div: return "/";
        case BinaryOp::eq: return "==";
        case BinaryOp::ne: return "!=";
        case BinaryOp::lt: return "<";
        case BinaryOp::le: return "<=";
        case BinaryOp::gt: return ">";
        case BinaryOp::ge: return ">=";
        case BinaryOp::logical_and: return "and";
        case BinaryOp::logical_or: return "or";
    }
    return "?";
}

std::string_view to_string(PlotKind k) noexcept {
    switch (k) {
        case PlotKind::histogram: return "histogram";
        case PlotKind::topk: return "topk";
        case PlotKind::timeline: return "timeline";
    }
    return "histogram";
}

Program parse(std::string_view source) { return Parser(tokenize(source)).program(); }

bool is_reserved(std::string_view word) noexcept { return contains(kReserved, word); }

bool is_plain_identifier(std::string_view name) noexcept {
    if (name.empty()) return false;
    const auto start = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    if (!start(name.front())) return false;
    for (char c : name) {
        if (!start(c) && !(c >= '0' && c <= '9')) return false;
    }
    return !is_reserved(name);
}

std::string quote_identifier(std::string_view name) {
    if (is_plain_identifier(name)) return std::string(name);
    std::string out = "`";
    for (char c : name) {
        if (c == '`') out.push_back('`');
        out.push_back(c);
    }
    out.push_back('`');
    return out;
}

std::string quote_string(std::string_view value) {
    std::string out = "\"";
    for (char c : value) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            case '\0': out += "\\0"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

std::string number_literal(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

}  // namespace liveprof::dsl
