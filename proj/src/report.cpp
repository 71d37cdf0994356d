#include "liveprof/report.hpp"

#include "liveprof/dsl/parser.hpp"
#include "liveprof/sync_server.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace liveprof {

std::string table_name_for(const std::filesystem::path& csv_path) {
    std::string name = csv_path.stem().string();
    for (char& c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) c = '_';
    }
    if (name.empty() || (name.front() >= '0' && name.front() <= '9')) name.insert(name.begin(), '_');
    if (dsl::is_reserved(name)) name += '_';
    return name;
}

Json report_json(const std::filesystem::path& csv_path, const CsvOptions& options) {
    Session session(std::filesystem::current_path(), options);
    const std::string source = "load " + dsl::quote_string(csv_path.string()) + " as " + table_name_for(csv_path);
    const ExecResult r = session.execute(source);
    if (!r.ok) {
        const auto& e = *r.error;
        if (e.kind == "IoError") throw IoError(e.message);
        throw Error(e.kind, e.message);
    }
    SyncServer server(std::move(session));
    return server.snapshot();
}

namespace {

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string num(const Json& v) {
    if (v.is_null()) return "&ndash;";
    if (v.is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v.get<double>());
        return buf;
    }
    return v.dump();
}

std::string timestamp_text(const Json& v) {
    if (v.is_null()) return "&ndash;";
    return format_timestamp(Timestamp{v.get<std::int64_t>()});
}

void bars_svg(std::ostringstream& out, const Json& counts) {
    constexpr int kWidth = 320;
    constexpr int kHeight = 60;
    std::size_t peak = 1;
    for (const auto& c : counts) peak = std::max(peak, c.get<std::size_t>());
    const std::size_t n = std::max<std::size_t>(counts.size(), 1);
    const double w = static_cast<double>(kWidth) / static_cast<double>(n);
    out << "<svg width=\"" << kWidth << "\" height=\"" << kHeight << "\" role=\"img\">";
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto c = counts[i].get<std::size_t>();
        const double h = static_cast<double>(kHeight) * static_cast<double>(c) / static_cast<double>(peak);
        out << "<rect x=\"" << static_cast<double>(i) * w << "\" y=\"" << kHeight - h << "\" width=\""
            << std::max(w - 1, 1.0) << "\" height=\"" << h << "\"><title>" << c << "</title></rect>";
    }
    out << "</svg>";
}

void stat_rows(std::ostringstream& out, const Json& summary, std::initializer_list<const char*> keys) {
    out << "<table class=\"stats\">";
    for (const char* k : keys) {
        if (!summary.contains(k)) continue;
        const Json& v = summary.at(k);
        out << "<tr><th>" << k << "</th><td>" << (v.is_string() ? escape(v.get<std::string>()) : num(v))
            << "</td></tr>";
    }
    out << "</table>";
}

void render_column(std::ostringstream& out, const Json& col) {
    const std::string kind = col.at("kind").get<std::string>();
    char pct[32];
    std::snprintf(pct, sizeof(pct), "%.1f%%", 100.0 * col.at("null_fraction").get<double>());
    out << "<section class=\"column\"><h3>" << escape(col.at("name").get<std::string>()) << " <small>"
        << escape(col.at("stype").get<std::string>()) << " &middot; " << pct << " missing</small></h3>";
    const Json& summary = col.at("summary");
    if (kind == "numeric") {
        bars_svg(out, col.at("histogram").at("counts"));
        stat_rows(out, summary, {"min", "q1", "median", "q3", "max", "mean", "std", "n_pos", "n_zero", "n_neg",
                                 "sortedness", "outliers_sigma", "outliers_iqr"});
    } else if (kind == "categorical") {
        out << "<p>" << summary.at("cardinality").get<std::size_t>() << " distinct values, "
            << summary.at("duplicate_rows").get<std::size_t>() << " duplicate rows"
            << (summary.at("is_unique").get<bool>() ? " (unique)" : "") << "</p>";
        out << "<table class=\"topk\">";
        for (const auto& tv : summary.at("top_values")) {
            out << "<tr><td>" << escape(tv.at("value").get<std::string>()) << "</td><td>"
                << tv.at("count").get<std::size_t>() << "</td></tr>";
        }
        out << "</table>";
        stat_rows(out, summary, {"strlen_min", "strlen_mean", "strlen_max"});
    } else {
        bars_svg(out, col.at("histogram").at("counts"));
        out << "<p>" << timestamp_text(summary.at("t_min")) << " &ndash; " << timestamp_text(summary.at("t_max"))
            << " &middot; " << escape(summary.at("sortedness").get<std::string>()) << "</p>";
    }
    out << "</section>";
}

}  // namespace

std::string render_html(const Json& payload) {
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Data profile</title><style>"
           "body{font-family:sans-serif;margin:2em}section.column{border-top:1px solid #ddd;padding:.5em 0}"
           "svg rect{fill:#4a7ebb}table.stats th{text-align:left;padding-right:1em;font-weight:normal;color:#555}"
           "small{color:#777;font-weight:normal}</style></head><body>\n";
    for (const auto& t : payload.at("profiles")) {
        out << "<article class=\"table\"><h2>" << escape(t.at("table_name").get<std::string>()) << "</h2><p>"
            << t.at("nrows").get<std::size_t>() << " rows &times; " << t.at("ncols").get<std::size_t>()
            << " columns &middot; fingerprint " << escape(t.at("fingerprint").at("hash").get<std::string>())
            << "</p>\n";
        for (const auto& col : t.at("columns")) {
            render_column(out, col);
            out << '\n';
        }
        out << "</article>\n";
    }
    out << "</body></html>\n";
    return out.str();
}

}  // namespace liveprof
