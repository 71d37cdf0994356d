#pragma once

// Straightforward re-implementations of the profile statistics, written
// without reference to the production code paths: insertion sort instead of
// std::sort, long double accumulation, linear bin scans, std::map counting.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct Present {
    std::vector<double> values;
    std::vector<std::size_t> rows;
};

inline Present present(const std::vector<std::optional<double>>& column) {
    Present p;
    for (std::size_t i = 0; i < column.size(); ++i) {
        if (column[i]) {
            p.values.push_back(*column[i]);
            p.rows.push_back(i);
        }
    }
    return p;
}

inline std::vector<double> insertion_sorted(std::vector<double> v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double x = v[i];
        std::size_t j = i;
        while (j > 0 && v[j - 1] > x) {
            v[j] = v[j - 1];
            --j;
        }
        v[j] = x;
    }
    return v;
}

// Hyndman-Fan type 7: position (n-1)p on the 0-based sorted sequence.
inline double quantile7(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = p * static_cast<double>(n - 1);
    std::size_t below = 0;
    while (static_cast<double>(below + 1) <= pos && below + 1 < n) ++below;
    const double t = pos - static_cast<double>(below);
    if (t == 0.0) return sorted[below];
    return sorted[below] + t * (sorted[below + 1] - sorted[below]);
}

struct Summary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0, std = 0;
    std::size_t n_pos = 0, n_zero = 0, n_neg = 0;
    std::string sortedness;
};

inline std::string sortedness(const std::vector<double>& v) {
    bool up = true;
    bool down = true;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        up = up && v[i] <= v[i + 1];
        down = down && v[i] >= v[i + 1];
    }
    return up ? "ascending" : down ? "descending" : "unsorted";
}

inline Summary summary(const std::vector<double>& values) {
    Summary s;
    const std::vector<double> sorted = insertion_sorted(values);
    s.min = sorted.front();
    s.max = sorted.back();
    s.q1 = quantile7(sorted, 0.25);
    s.median = quantile7(sorted, 0.5);
    s.q3 = quantile7(sorted, 0.75);
    long double total = 0;
    for (double v : values) total += v;
    const long double mean = total / static_cast<long double>(values.size());
    s.mean = static_cast<double>(mean);
    if (values.size() > 1) {
        long double sq = 0;
        for (double v : values) sq += (v - mean) * (v - mean);
        s.std = static_cast<double>(std::sqrt(sq / static_cast<long double>(values.size() - 1)));
    }
    for (double v : values) {
        if (v > 0) ++s.n_pos;
        if (v == 0) ++s.n_zero;
        if (v < 0) ++s.n_neg;
    }
    s.sortedness = sortedness(values);
    return s;
}

struct Bins {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
};

// Equal-width bins over [min, max]; bin i is [e_i, e_{i+1}) except the last,
// which is closed. The bin count is ceil(sqrt n) capped at max_bins.
inline Bins histogram(const std::vector<double>& values, std::size_t max_bins) {
    Bins b;
    if (values.empty()) return b;
    const std::vector<double> sorted = insertion_sorted(values);
    const double lo = sorted.front();
    const double hi = sorted.back();
    if (lo == hi) {
        b.edges = {lo, hi};
        b.counts = {values.size()};
        return b;
    }
    std::size_t bins = 1;
    while (bins * bins < values.size()) ++bins;
    if (bins > max_bins) bins = max_bins;
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i < bins; ++i) b.edges.push_back(lo + static_cast<double>(i) * width);
    b.edges.push_back(hi);
    b.counts.assign(bins, 0);
    for (double v : values) {
        for (std::size_t i = 0; i < bins; ++i) {
            const bool last = i + 1 == bins;
            if (v >= b.edges[i] && (v < b.edges[i + 1] || (last && v <= b.edges[i + 1]))) {
                ++b.counts[i];
                break;
            }
        }
    }
    return b;
}

inline std::vector<std::size_t> sigma_rows(const Present& p, double k) {
    std::vector<std::size_t> rows;
    if (p.values.size() < 2) return rows;
    const Summary s = summary(p.values);
    if (s.std == 0) return rows;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        if (std::fabs(p.values[i] - s.mean) > k * s.std) rows.push_back(p.rows[i]);
    }
    return rows;
}

inline std::vector<std::size_t> iqr_rows(const Present& p, double k) {
    std::vector<std::size_t> rows;
    if (p.values.empty()) return rows;
    const Summary s = summary(p.values);
    const double spread = s.q3 - s.q1;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        const double v = p.values[i];
        if (v < s.q1 - k * spread || v > s.q3 + k * spread) rows.push_back(p.rows[i]);
    }
    return rows;
}

struct Counts {
    std::vector<std::pair<std::string, std::size_t>> top;
    std::size_t cardinality = 0;
    std::size_t duplicate_rows = 0;
};

inline Counts value_counts(const std::vector<std::optional<std::string>>& column, std::size_t k) {
    std::map<std::string, std::size_t> freq;
    std::size_t nonnull = 0;
    for (const auto& v : column) {
        if (!v) continue;
        ++freq[*v];
        ++nonnull;
    }
    Counts c;
    c.cardinality = freq.size();
    c.duplicate_rows = nonnull - freq.size();
    // Repeatedly pick the largest count; std::map iteration gives the
    // lexicographically smallest value among ties.
    std::map<std::string, std::size_t> left = freq;
    while (c.top.size() < k && !left.empty()) {
        auto best = left.begin();
        for (auto it = left.begin(); it != left.end(); ++it) {
            if (it->second > best->second) best = it;
        }
        c.top.emplace_back(best->first, best->second);
        left.erase(best);
    }
    return c;
}

}  // namespace oracle
