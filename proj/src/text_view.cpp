#include "liveprof/text_view.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace liveprof {

namespace {

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string summary_cell(const ColumnProfile& c) {
    std::ostringstream out;
    if (const auto* num = std::get_if<NumericProfile>(&c.body)) {
        const auto& s = num->summary;
        if (s.empty) return "(no values)";
        out << "min " << fixed(s.min) << "  med " << fixed(s.median) << "  max " << fixed(s.max) << "  mean "
            << fixed(s.mean) << "  std " << fixed(s.std) << "  outliers " << s.outliers_sigma << "/"
            << s.outliers_iqr;
    } else if (const auto* cat = std::get_if<CategoricalSummary>(&c.body)) {
        out << cat->cardinality << " distinct";
        if (cat->is_unique) out << " (unique)";
        if (!cat->top_values.empty()) {
            out << "  top \"" << cat->top_values.front().value << "\" x" << cat->top_values.front().count;
        }
    } else if (const auto* tmp = std::get_if<TemporalSummary>(&c.body)) {
        if (!tmp->t_min) return "(no values)";
        out << format_timestamp(*tmp->t_min) << " .. " << format_timestamp(*tmp->t_max) << "  "
            << to_string(tmp->sortedness);
    }
    return out.str();
}

void bars(std::ostringstream& out, const std::vector<std::pair<std::string, std::size_t>>& rows, std::size_t width) {
    std::size_t label_w = 0;
    std::size_t peak = 1;
    for (const auto& [label, n] : rows) {
        label_w = std::max(label_w, label.size());
        peak = std::max(peak, n);
    }
    for (const auto& [label, n] : rows) {
        const std::size_t len = (n * width + peak - 1) / peak;
        out << pad(label, label_w) << " | " << std::string(len, '#') << ' ' << n << '\n';
    }
}

}  // namespace

std::string shape_line(const std::string& name, const Table& table) {
    return name + ": " + std::to_string(table.nrows()) + " rows × " + std::to_string(table.ncols()) + " cols";
}

std::string profile_text(const TableProfile& profile) {
    std::size_t name_w = 4;
    for (const auto& c : profile.columns) name_w = std::max(name_w, c.name.size());
    std::ostringstream out;
    out << "  " << pad("column", name_w) << "  " << pad("type", 11) << "  " << pad("null", 6) << "  summary\n";
    for (const auto& c : profile.columns) {
        char pct[16];
        std::snprintf(pct, sizeof(pct), "%.1f%%", 100.0 * c.null_fraction);
        out << "  " << pad(c.name, name_w) << "  " << pad(std::string(to_string(c.stype)), 11) << "  " << pad(pct, 6)
            << "  " << summary_cell(c) << '\n';
    }
    return out.str();
}

std::string plot_text(const Table& table, const PlotRequest& plot, std::size_t width) {
    const Column& col = table.column(plot.column);
    std::ostringstream out;
    out << dsl::to_string(plot.kind) << " of " << plot.table << '.' << plot.column << '\n';
    std::vector<std::pair<std::string, std::size_t>> rows;
    if (plot.kind == dsl::PlotKind::topk) {
        for (const auto& vc : categorical_profile(col).top_values) rows.emplace_back(vc.value, vc.count);
    } else {
        const Histogram h =
            plot.kind == dsl::PlotKind::timeline ? temporal_profile(col).histogram : numeric_histogram(col);
        const bool temporal = plot.kind == dsl::PlotKind::timeline;
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            const auto edge = [&](double v) {
                return temporal ? format_timestamp(Timestamp{static_cast<std::int64_t>(v)}) : fixed(v);
            };
            rows.emplace_back("[" + edge(h.bin_edges[i]) + ", " + edge(h.bin_edges[i + 1]) +
                                  (i + 1 == h.counts.size() ? "]" : ")"),
                              h.counts[i]);
        }
    }
    bars(out, rows, width);
    return out.str();
}

}  // namespace liveprof
