#include "liveprof/csv.hpp"

#include "liveprof/error.hpp"
#include "liveprof/tokens.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace liveprof {

namespace {

struct Field {
    std::string text;
    bool quoted = false;
};

struct Record {
    std::size_t line = 0;
    std::vector<Field> fields;
};

class Reader {
public:
    Reader(std::string_view text, const CsvOptions& options) : text_(text), opt_(options) {
        if (text_.substr(0, 3) == "\xEF\xBB\xBF") text_.remove_prefix(3);
    }

    bool next(Record& rec) {
        if (pos_ >= text_.size()) return false;
        rec.line = line_;
        rec.fields.clear();
        Field field;
        bool after_quote = false;
        while (true) {
            if (pos_ >= text_.size()) {
                rec.fields.push_back(std::move(field));
                return true;
            }
            const char c = text_[pos_];
            if (c == opt_.delimiter) {
                rec.fields.push_back(std::move(field));
                field = {};
                after_quote = false;
                ++pos_;
            } else if (c == '\n' || c == '\r') {
                rec.fields.push_back(std::move(field));
                consume_newline();
                return true;
            } else if (after_quote) {
                throw CsvError(line_, "unexpected character after closing quote");
            } else if (c == opt_.quote && field.text.empty() && !field.quoted) {
                read_quoted(field, rec.line);
                after_quote = true;
            } else {
                field.text.push_back(c);
                ++pos_;
            }
        }
    }

private:
    void consume_newline() {
        if (text_[pos_] == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') ++pos_;
        ++pos_;
        ++line_;
    }

    void read_quoted(Field& field, std::size_t record_line) {
        field.quoted = true;
        ++pos_;
        while (true) {
            if (pos_ >= text_.size()) throw CsvError(record_line, "unclosed quoted field");
            const char c = text_[pos_];
            if (c == opt_.quote) {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == opt_.quote) {
                    field.text.push_back(opt_.quote);
                    pos_ += 2;
                    continue;
                }
                ++pos_;
                return;
            }
            if (c == '\n') ++line_;
            if (c == '\r' && !(pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n')) ++line_;
            field.text.push_back(c);
            ++pos_;
        }
    }

    std::string_view text_;
    const CsvOptions& opt_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

bool all_of_tokens(std::span<const std::optional<std::string>> raw, auto&& pred) {
    return std::all_of(raw.begin(), raw.end(), [&](const auto& tok) { return !tok || pred(*tok); });
}

}  // namespace

SemanticType infer_semantic_type(std::span<const std::optional<std::string>> raw) {
    const bool any = std::any_of(raw.begin(), raw.end(), [](const auto& t) { return t.has_value(); });
    if (!any) return SemanticType::categorical;
    if (all_of_tokens(raw, [](const std::string& s) { return parse_bool(s).has_value(); })) {
        return SemanticType::boolean;
    }
    if (all_of_tokens(raw, [](const std::string& s) { return parse_int(s).has_value(); })) {
        return SemanticType::integer;
    }
    if (all_of_tokens(raw, [](const std::string& s) { return parse_float(s).has_value(); })) {
        return SemanticType::float_;
    }
    if (all_of_tokens(raw, [](const std::string& s) { return parse_timestamp(s).has_value(); })) {
        return SemanticType::temporal;
    }
    return SemanticType::categorical;
}

Column make_column(std::string name, std::span<const std::optional<std::string>> raw) {
    Column col;
    col.name = std::move(name);
    col.stype = infer_semantic_type(raw);
    col.values.reserve(raw.size());
    for (const auto& tok : raw) {
        if (!tok) {
            col.values.emplace_back(Null{});
            continue;
        }
        switch (col.stype) {
            case SemanticType::boolean: col.values.emplace_back(*parse_bool(*tok)); break;
            case SemanticType::integer: col.values.emplace_back(*parse_int(*tok)); break;
            case SemanticType::float_: col.values.emplace_back(*parse_float(*tok)); break;
            case SemanticType::temporal: col.values.emplace_back(*parse_timestamp(*tok)); break;
            case SemanticType::categorical: col.values.emplace_back(*tok); break;
        }
    }
    return col;
}

Table parse_csv(std::string_view text, const CsvOptions& options, std::string table_name) {
    Reader reader(text, options);
    Record rec;
    if (!reader.next(rec)) throw CsvError(1, "missing header row");

    std::vector<std::string> names;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < rec.fields.size(); ++i) {
        std::string name = rec.fields[i].text;
        if (name.empty() && !rec.fields[i].quoted) name = "column_" + std::to_string(i + 1);
        if (!seen.insert(name).second) throw CsvError(rec.line, "duplicate column name '" + name + "'");
        names.push_back(std::move(name));
    }

    const auto is_na = [&](const Field& f) {
        return !f.quoted && std::find(options.na_tokens.begin(), options.na_tokens.end(), f.text) !=
                                options.na_tokens.end();
    };

    std::vector<std::vector<std::optional<std::string>>> raw(names.size());
    while (reader.next(rec)) {
        if (rec.fields.size() != names.size()) {
            throw CsvError(rec.line, "expected " + std::to_string(names.size()) + " fields, found " +
                                         std::to_string(rec.fields.size()));
        }
        for (std::size_t i = 0; i < rec.fields.size(); ++i) {
            auto& f = rec.fields[i];
            if (is_na(f)) {
                raw[i].emplace_back(std::nullopt);
            } else {
                raw[i].emplace_back(std::move(f.text));
            }
        }
    }

    std::vector<Column> columns;
    columns.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) columns.push_back(make_column(names[i], raw[i]));
    return Table(std::move(table_name), std::move(columns));
}

Table read_csv(const std::filesystem::path& path, const CsvOptions& options, std::string table_name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read '" + path.string() + "'");
    return parse_csv(buf.str(), options, std::move(table_name));
}

namespace {

void write_field(std::ostream& out, const std::string& text, bool force_quote, const CsvOptions& opt) {
    const bool needs = force_quote || text.find(opt.delimiter) != std::string::npos ||
                       text.find(opt.quote) != std::string::npos ||
                       text.find_first_of("\r\n") != std::string::npos ||
                       std::find(opt.na_tokens.begin(), opt.na_tokens.end(), text) != opt.na_tokens.end() ||
                       (!text.empty() && text.front() == opt.quote);
    if (!needs) {
        out << text;
        return;
    }
    out << opt.quote;
    for (char c : text) {
        if (c == opt.quote) out << opt.quote;
        out << c;
    }
    out << opt.quote;
}

}  // namespace

void write_csv(const Table& table, std::ostream& out, const CsvOptions& options) {
    const auto& cols = table.columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out << options.delimiter;
        write_field(out, cols[i].name, false, options);
    }
    out << '\n';
    for (std::size_t r = 0; r < table.nrows(); ++r) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) out << options.delimiter;
            const Cell& cell = cols[i].values[r];
            if (is_null(cell)) continue;
            write_field(out, render_cell(cell), std::holds_alternative<std::string>(cell), options);
        }
        out << '\n';
    }
}

std::string to_csv(const Table& table, const CsvOptions& options) {
    std::ostringstream out;
    write_csv(table, out, options);
    return out.str();
}

}  // namespace liveprof
