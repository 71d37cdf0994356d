#include "liveprof/profile.hpp"

#include "liveprof/error.hpp"

#include <algorithm>
#include <cmath>
#include <string_view>
#include <unordered_map>

namespace liveprof {

std::string_view to_string(Sortedness s) noexcept {
    switch (s) {
        case Sortedness::ascending: return "ascending";
        case Sortedness::descending: return "descending";
        case Sortedness::unsorted: return "unsorted";
    }
    return "unsorted";
}

double quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw Error("EmptyInput", "quantile of an empty sequence");
    if (sorted.size() == 1) return sorted.front();
    p = std::clamp(p, 0.0, 1.0);
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0 || lo + 1 >= sorted.size()) return sorted[lo];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

NumericValues numeric_values(const Column& column) {
    if (!is_numeric(column.stype)) {
        throw TypeError("column '" + column.name + "' is " + std::string(to_string(column.stype)) +
                        ", not numeric");
    }
    NumericValues out;
    out.values.reserve(column.size());
    out.rows.reserve(column.size());
    for (std::size_t i = 0; i < column.size(); ++i) {
        const Cell& c = column.values[i];
        if (const auto* iv = std::get_if<std::int64_t>(&c)) {
            out.values.push_back(static_cast<double>(*iv));
            out.rows.push_back(i);
        } else if (const auto* dv = std::get_if<double>(&c)) {
            out.values.push_back(*dv);
            out.rows.push_back(i);
        } else {
            ++out.n_null;
        }
    }
    return out;
}

Moments moments(std::span<const double> values) noexcept {
    Moments m;
    if (values.empty()) return m;
    double sum = 0;
    for (double v : values) sum += v;
    m.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0;
        for (double v : values) ss += (v - m.mean) * (v - m.mean);
        m.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return m;
}

Quartiles quartiles(std::span<const double> sorted) {
    return {quantile(sorted, 0.25), quantile(sorted, 0.5), quantile(sorted, 0.75)};
}

namespace {

template <typename T>
Sortedness sortedness_of(std::span<const T> v) {
    bool asc = true;
    bool desc = true;
    for (std::size_t i = 1; i < v.size() && (asc || desc); ++i) {
        if (v[i - 1] > v[i]) asc = false;
        if (v[i - 1] < v[i]) desc = false;
    }
    if (asc) return Sortedness::ascending;
    if (desc) return Sortedness::descending;
    return Sortedness::unsorted;
}

std::vector<double> make_edges(double lo, double hi, std::size_t bins) {
    double width = (hi - lo) / static_cast<double>(bins);
    if (!std::isfinite(width)) width = hi / static_cast<double>(bins) - lo / static_cast<double>(bins);
    std::vector<double> edges(bins + 1);
    for (std::size_t i = 0; i < bins; ++i) edges[i] = lo + static_cast<double>(i) * width;
    edges[bins] = hi;
    return edges;
}

bool strictly_increasing(const std::vector<double>& e) {
    for (std::size_t i = 1; i < e.size(); ++i) {
        if (!(e[i - 1] < e[i])) return false;
    }
    return true;
}

std::size_t utf8_length(std::string_view s) noexcept {
    std::size_t n = 0;
    for (char c : s) n += (static_cast<unsigned char>(c) & 0xC0) != 0x80 ? 1 : 0;
    return n;
}

}  // namespace

Histogram bin_values(std::span<const double> values, std::size_t n_null, std::size_t max_bins) {
    Histogram h;
    h.n_null = n_null;
    if (values.empty()) return h;

    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *min_it;
    const double hi = *max_it;
    if (lo == hi) {
        h.bin_edges = {lo, hi};
        h.counts = {values.size()};
        return h;
    }

    auto bins = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(values.size()))));
    bins = std::clamp<std::size_t>(bins, 1, max_bins);
    h.bin_edges = make_edges(lo, hi, bins);
    // Near the limits of double precision adjacent edges can collide.
    while (bins > 1 && !strictly_increasing(h.bin_edges)) h.bin_edges = make_edges(lo, hi, --bins);

    h.counts.assign(bins, 0);
    for (double v : values) ++h.counts[bin_index(h, v)];
    return h;
}

std::size_t bin_index(const Histogram& h, double v) noexcept {
    const std::size_t bins = h.counts.size();
    if (bins <= 1) return 0;
    const double lo = h.bin_edges.front();
    const double hi = h.bin_edges.back();
    double guess = std::floor((v - lo) / (hi - lo) * static_cast<double>(bins));
    if (!std::isfinite(guess)) guess = 0;
    auto idx = static_cast<std::size_t>(std::clamp(guess, 0.0, static_cast<double>(bins - 1)));
    while (idx > 0 && v < h.bin_edges[idx]) --idx;
    while (idx + 1 < bins && v >= h.bin_edges[idx + 1]) ++idx;
    return idx;
}

Histogram numeric_histogram(const Column& column) {
    const NumericValues nv = numeric_values(column);
    return bin_values(nv.values, nv.n_null, kNumericMaxBins);
}

namespace {

OutlierSet sigma_rows(const NumericValues& nv, const Moments& m, double k) {
    OutlierSet out;
    if (m.std == 0.0) return out;
    const double lo = m.mean - k * m.std;
    const double hi = m.mean + k * m.std;
    for (std::size_t i = 0; i < nv.values.size(); ++i) {
        if (nv.values[i] < lo || nv.values[i] > hi) out.rows.push_back(nv.rows[i]);
    }
    return out;
}

OutlierSet iqr_rows(const NumericValues& nv, const Quartiles& q, double k) {
    OutlierSet out;
    const double iqr = q.q3 - q.q1;
    const double lo = q.q1 - k * iqr;
    const double hi = q.q3 + k * iqr;
    for (std::size_t i = 0; i < nv.values.size(); ++i) {
        if (nv.values[i] < lo || nv.values[i] > hi) out.rows.push_back(nv.rows[i]);
    }
    return out;
}

std::vector<double> sorted_copy(const std::vector<double>& v) {
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace

NumericSummary numeric_summary(const Column& column) {
    const NumericValues nv = numeric_values(column);
    NumericSummary s;
    s.n_nonnull = nv.values.size();
    s.sortedness = sortedness_of<double>(nv.values);
    if (nv.values.empty()) return s;
    s.empty = false;

    const std::vector<double> sorted = sorted_copy(nv.values);
    const Moments m = moments(nv.values);
    const Quartiles q = quartiles(sorted);
    s.min = sorted.front();
    s.max = sorted.back();
    s.q1 = q.q1;
    s.median = q.median;
    s.q3 = q.q3;
    s.mean = m.mean;
    s.std = m.std;
    for (double v : nv.values) {
        if (v > 0) {
            ++s.n_pos;
        } else if (v < 0) {
            ++s.n_neg;
        } else {
            ++s.n_zero;
        }
    }
    s.outliers_sigma = sigma_rows(nv, m, kSigmaFactor).count();
    s.outliers_iqr = iqr_rows(nv, q, kIqrFactor).count();
    return s;
}

OutlierSet outliers_sigma(const Column& column, double k) {
    const NumericValues nv = numeric_values(column);
    return sigma_rows(nv, moments(nv.values), k);
}

OutlierSet outliers_iqr(const Column& column, double k) {
    const NumericValues nv = numeric_values(column);
    if (nv.values.empty()) return {};
    return iqr_rows(nv, quartiles(sorted_copy(nv.values)), k);
}

CategoricalSummary categorical_profile(const Column& column, std::size_t k) {
    if (column.stype != SemanticType::categorical && column.stype != SemanticType::boolean) {
        throw TypeError("column '" + column.name + "' is not categorical or boolean");
    }
    CategoricalSummary s;
    std::unordered_map<std::string_view, std::size_t> counts;
    std::size_t n_nonnull = 0;
    std::size_t len_sum = 0;
    bool first = true;
    for (const Cell& c : column.values) {
        std::string_view text;
        if (const auto* str = std::get_if<std::string>(&c)) {
            text = *str;
        } else if (const auto* b = std::get_if<bool>(&c)) {
            text = *b ? "true" : "false";
        } else {
            ++s.n_null;
            continue;
        }
        ++n_nonnull;
        ++counts[text];
        const std::size_t len = utf8_length(text);
        len_sum += len;
        s.strlen_min = first ? len : std::min(s.strlen_min, len);
        s.strlen_max = first ? len : std::max(s.strlen_max, len);
        first = false;
    }
    s.cardinality = counts.size();
    s.duplicate_rows = n_nonnull - s.cardinality;
    s.is_unique = s.duplicate_rows == 0;
    s.strlen_mean = n_nonnull ? static_cast<double>(len_sum) / static_cast<double>(n_nonnull) : 0.0;

    std::vector<std::pair<std::string_view, std::size_t>> ranked(counts.begin(), counts.end());
    const auto by_rank = [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    };
    const std::size_t top = std::min(k, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top), ranked.end(), by_rank);
    for (std::size_t i = 0; i < top; ++i) s.top_values.push_back({std::string(ranked[i].first), ranked[i].second});
    return s;
}

TemporalSummary temporal_profile(const Column& column) {
    if (column.stype != SemanticType::temporal) {
        throw TypeError("column '" + column.name + "' is not temporal");
    }
    std::vector<std::int64_t> ms;
    ms.reserve(column.size());
    std::size_t n_null = 0;
    for (const Cell& c : column.values) {
        if (const auto* t = std::get_if<Timestamp>(&c)) {
            ms.push_back(t->epoch_ms);
        } else {
            ++n_null;
        }
    }
    TemporalSummary s;
    s.n_nonnull = ms.size();
    s.sortedness = sortedness_of<std::int64_t>(ms);
    std::vector<double> as_double(ms.begin(), ms.end());
    s.histogram = bin_values(as_double, n_null, kTemporalMaxBins);
    if (!ms.empty()) {
        const auto [lo, hi] = std::minmax_element(ms.begin(), ms.end());
        s.t_min = Timestamp{*lo};
        s.t_max = Timestamp{*hi};
    }
    return s;
}

ColumnProfile profile_column(const Column& column) {
    ColumnProfile p;
    p.name = column.name;
    p.stype = column.stype;
    p.n_null = column.null_count();
    p.null_fraction = column.size() ? static_cast<double>(p.n_null) / static_cast<double>(column.size()) : 0.0;
    switch (column.stype) {
        case SemanticType::integer:
        case SemanticType::float_:
            p.body = NumericProfile{numeric_histogram(column), numeric_summary(column)};
            break;
        case SemanticType::temporal: p.body = temporal_profile(column); break;
        case SemanticType::boolean:
        case SemanticType::categorical: p.body = categorical_profile(column); break;
    }
    return p;
}

TableProfile profile_table(const Table& table, std::uint64_t epoch, bool temporary) {
    TableProfile p;
    p.table_name = table.name();
    p.nrows = table.nrows();
    p.ncols = table.ncols();
    p.epoch = epoch;
    p.fingerprint = fingerprint(table);
    p.temporary = temporary;
    p.columns.reserve(table.ncols());
    for (const auto& col : table.columns()) p.columns.push_back(profile_column(col));
    return p;
}

}  // namespace liveprof
