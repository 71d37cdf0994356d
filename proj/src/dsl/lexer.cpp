#include "lexer.hpp"

#include "liveprof/dsl/parser.hpp"

#include <charconv>
#include <cmath>

namespace liveprof::dsl {

namespace {

bool is_ident_start(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) noexcept { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_blanks();
            if (pos_ >= src_.size()) break;
            const char c = src_[pos_];
            if (c == '\n' || c == ';') {
                if (depth_ == 0) out.push_back(make(TokenKind::newline, std::string(1, c), 1));
                advance(1);
                if (c == '\n') next_line();
                continue;
            }
            if (is_ident_start(c)) {
                out.push_back(word());
            } else if (c == '`') {
                out.push_back(quoted_ident());
            } else if (is_digit(c)) {
                out.push_back(number());
            } else if (c == '"') {
                out.push_back(string_literal());
            } else {
                out.push_back(symbol());
            }
        }
        Token end;
        end.kind = TokenKind::end;
        end.span = {line_, column(), 0};
        out.push_back(std::move(end));
        return out;
    }

private:
    [[nodiscard]] std::size_t column() const noexcept { return pos_ - line_start_ + 1; }

    void advance(std::size_t n) noexcept { pos_ += n; }

    void next_line() noexcept {
        ++line_;
        line_start_ = pos_;
    }

    Token make(TokenKind kind, std::string text, std::size_t length) const {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.span = {line_, column(), length};
        return t;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message, {line_, column(), 1}, {});
    }

    void skip_blanks() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r') {
                advance(1);
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
            } else if (c == '\n' && depth_ > 0) {
                advance(1);
                next_line();
            } else {
                break;
            }
        }
    }

    Token word() {
        std::size_t end = pos_;
        while (end < src_.size() && is_ident_char(src_[end])) ++end;
        std::string text(src_.substr(pos_, end - pos_));
        Token t = make(is_reserved(text) ? TokenKind::keyword : TokenKind::identifier, text, end - pos_);
        advance(end - pos_);
        return t;
    }

    Token quoted_ident() {
        const std::size_t start_line = line_;
        const std::size_t start_col = column();
        const std::size_t start = pos_;
        advance(1);
        std::string name;
        while (true) {
            if (pos_ >= src_.size()) {
                throw ParseError("unterminated quoted identifier", {start_line, start_col, 1}, {"`"});
            }
            if (src_[pos_] == '`') {
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '`') {
                    name.push_back('`');
                    advance(2);
                    continue;
                }
                advance(1);
                break;
            }
            name.push_back(src_[pos_]);
            advance(1);
            if (name.back() == '\n') next_line();
        }
        if (name.empty()) throw ParseError("empty quoted identifier", {start_line, start_col, 2}, {});
        Token t;
        t.kind = TokenKind::identifier;
        t.text = std::move(name);
        t.span = {start_line, start_col, pos_ - start};
        return t;
    }

    Token number() {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        bool is_float = false;
        while (end < src_.size() && is_digit(src_[end])) ++end;
        if (end + 1 < src_.size() && src_[end] == '.' && is_digit(src_[end + 1])) {
            is_float = true;
            ++end;
            while (end < src_.size() && is_digit(src_[end])) ++end;
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
            if (e < src_.size() && is_digit(src_[e])) {
                is_float = true;
                end = e;
                while (end < src_.size() && is_digit(src_[end])) ++end;
            }
        }
        if (end < src_.size() && is_ident_char(src_[end])) fail("malformed number");
        const std::string_view text = src_.substr(start, end - start);
        Token t = make(TokenKind::integer, std::string(text), text.size());
        if (!is_float) {
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), t.int_value);
            if (ec == std::errc{}) {
                advance(text.size());
                return t;
            }
            // Integer literals beyond int64 are read as floats.
        }
        t.kind = TokenKind::floating;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), t.float_value);
        if (ec != std::errc{} || !std::isfinite(t.float_value)) fail("number out of range");
        advance(text.size());
        return t;
    }

    Token string_literal() {
        const std::size_t start_line = line_;
        const std::size_t start_col = column();
        const std::size_t start = pos_;
        advance(1);
        std::string value;
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n') {
                throw ParseError("unterminated string literal", {start_line, start_col, 1}, {"\""});
            }
            const char c = src_[pos_];
            if (c == '"') {
                advance(1);
                break;
            }
            if (c == '\\') {
                if (pos_ + 1 >= src_.size()) fail("unterminated escape sequence");
                const char e = src_[pos_ + 1];
                switch (e) {
                    case 'n': value.push_back('\n'); break;
                    case 't': value.push_back('\t'); break;
                    case 'r': value.push_back('\r'); break;
                    case '0': value.push_back('\0'); break;
                    case '\\': value.push_back('\\'); break;
                    case '"': value.push_back('"'); break;
                    default: fail(std::string("unknown escape sequence \\") + e);
                }
                advance(2);
                continue;
            }
            value.push_back(c);
            advance(1);
        }
        Token t;
        t.kind = TokenKind::string;
        t.text = std::move(value);
        t.span = {start_line, start_col, pos_ - start};
        return t;
    }

    Token symbol() {
        static constexpr std::string_view kTwo[] = {"==", "!=", "<=", ">="};
        for (auto s : kTwo) {
            if (src_.substr(pos_, 2) == s) {
                Token t = make(TokenKind::symbol, std::string(s), 2);
                advance(2);
                return t;
            }
        }
        const char c = src_[pos_];
        static constexpr std::string_view kOne = "=<>+-*/(),.";
        if (kOne.find(c) == std::string_view::npos) fail(std::string("unexpected character '") + c + "'");
        if (c == '(') ++depth_;
        if (c == ')' && depth_ > 0) --depth_;
        Token t = make(TokenKind::symbol, std::string(1, c), 1);
        advance(1);
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t line_start_ = 0;
    int depth_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace liveprof::dsl
