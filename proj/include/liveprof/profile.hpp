#pragma once

#include "liveprof/fingerprint.hpp"
#include "liveprof/table.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace liveprof {

enum class Sortedness : std::uint8_t { ascending, descending, unsorted };

[[nodiscard]] std::string_view to_string(Sortedness s) noexcept;

/// Equal-width binned distribution. Bins are right-open except the last,
/// which is closed. A column with a single distinct value has one bin [v, v].
struct Histogram {
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    std::size_t n_null = 0;

    bool operator==(const Histogram&) const = default;
};

inline constexpr std::size_t kNumericMaxBins = 40;
inline constexpr std::size_t kTemporalMaxBins = 100;
inline constexpr std::size_t kTopValues = 10;
inline constexpr double kSigmaFactor = 3.0;
inline constexpr double kIqrFactor = 1.5;

struct NumericSummary {
    bool empty = true;
    std::size_t n_nonnull = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0, std = 0;
    std::size_t n_pos = 0, n_zero = 0, n_neg = 0;
    Sortedness sortedness = Sortedness::ascending;
    std::size_t outliers_sigma = 0;
    std::size_t outliers_iqr = 0;

    bool operator==(const NumericSummary&) const = default;
};

struct ValueCount {
    std::string value;
    std::size_t count = 0;

    bool operator==(const ValueCount&) const = default;
};

struct CategoricalSummary {
    std::size_t cardinality = 0;
    std::vector<ValueCount> top_values;
    std::size_t n_null = 0;
    std::size_t duplicate_rows = 0;
    bool is_unique = true;
    std::size_t strlen_min = 0;
    double strlen_mean = 0;
    std::size_t strlen_max = 0;

    bool operator==(const CategoricalSummary&) const = default;
};

struct TemporalSummary {
    Histogram histogram;
    std::size_t n_nonnull = 0;
    std::optional<Timestamp> t_min;
    std::optional<Timestamp> t_max;
    Sortedness sortedness = Sortedness::ascending;

    bool operator==(const TemporalSummary&) const = default;
};

struct NumericProfile {
    Histogram histogram;
    NumericSummary summary;

    bool operator==(const NumericProfile&) const = default;
};

struct ColumnProfile {
    std::string name;
    SemanticType stype = SemanticType::categorical;
    std::size_t n_null = 0;
    double null_fraction = 0;
    std::variant<NumericProfile, CategoricalSummary, TemporalSummary> body;

    bool operator==(const ColumnProfile&) const = default;
};

struct TableProfile {
    std::string table_name;
    std::size_t nrows = 0;
    std::size_t ncols = 0;
    std::vector<ColumnProfile> columns;
    std::uint64_t epoch = 0;
    Fingerprint fingerprint;
    bool temporary = false;

    bool operator==(const TableProfile&) const = default;
};

/// Rows matched by an outlier rule, as 0-based row indices in table order.
struct OutlierSet {
    std::vector<std::size_t> rows;

    [[nodiscard]] std::size_t count() const noexcept { return rows.size(); }
};

/// Type-7 quantile: linear interpolation between order statistics at
/// position (n - 1) * p. `sorted` must be ascending. Throws EmptyInput.
[[nodiscard]] double quantile(std::span<const double> sorted, double p);

/// Non-null numeric cells of an integer or float column, in row order, plus
/// their row indices. Throws TypeError for other column types.
struct NumericValues {
    std::vector<double> values;
    std::vector<std::size_t> rows;
    std::size_t n_null = 0;
};
[[nodiscard]] NumericValues numeric_values(const Column& column);

/// Mean, sample standard deviation and quartiles of a value set. These are
/// the exact routines behind both the summaries and the DSL aggregates.
struct Moments {
    double mean = 0;
    double std = 0;
};
[[nodiscard]] Moments moments(std::span<const double> values) noexcept;

struct Quartiles {
    double q1 = 0, median = 0, q3 = 0;
};
[[nodiscard]] Quartiles quartiles(std::span<const double> sorted);

/// Equal-width binning of `values` over [min, max] with
/// B = min(max_bins, ceil(sqrt(n))) bins, or one degenerate bin when there is
/// at most one distinct value.
[[nodiscard]] Histogram bin_values(std::span<const double> values, std::size_t n_null, std::size_t max_bins);

/// Index of the bin holding `v`, consistent with the edge comparisons used by
/// range exports (>= lo and < hi, last bin closed).
[[nodiscard]] std::size_t bin_index(const Histogram& h, double v) noexcept;

[[nodiscard]] Histogram numeric_histogram(const Column& column);
[[nodiscard]] NumericSummary numeric_summary(const Column& column);
[[nodiscard]] OutlierSet outliers_sigma(const Column& column, double k = kSigmaFactor);
[[nodiscard]] OutlierSet outliers_iqr(const Column& column, double k = kIqrFactor);
[[nodiscard]] CategoricalSummary categorical_profile(const Column& column, std::size_t k = kTopValues);
[[nodiscard]] TemporalSummary temporal_profile(const Column& column);

[[nodiscard]] ColumnProfile profile_column(const Column& column);

/// Profiles every column of `table`. `epoch` and `temporary` are stamped onto
/// the result unchanged.
[[nodiscard]] TableProfile profile_table(const Table& table, std::uint64_t epoch = 0, bool temporary = false);

}  // namespace liveprof
