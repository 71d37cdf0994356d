#pragma once

#include "liveprof/csv.hpp"
#include "liveprof/dsl/ast.hpp"
#include "liveprof/error.hpp"
#include "liveprof/fingerprint.hpp"
#include "liveprof/table.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace liveprof {

enum class CastTarget : std::uint8_t { integer, float_, temporal };
enum class CastMode : std::uint8_t { strict, coercing };

/// Retypes one column. Strict mode throws CastError at the first non-null
/// cell that does not convert; coercing mode turns such cells into nulls.
/// Every other cell and column is preserved exactly.
[[nodiscard]] Table mutate_cast(const Table& table, std::string_view column, CastTarget target, CastMode mode);

/// Name given to the temporary profile of a bare table expression.
[[nodiscard]] std::string temp_output_name(std::uint64_t epoch);

struct Binding {
    TablePtr table;
    Fingerprint fingerprint;
    std::uint64_t last_epoch = 0;
};

struct TempOutput {
    std::string name;
    Binding binding;
};

/// One live table as seen by profilers and exporters.
struct TableEntry {
    std::string name;
    TablePtr table;
    Fingerprint fingerprint;
    std::uint64_t last_epoch = 0;
    bool temporary = false;
};

struct ExecError {
    std::string kind;
    std::string message;
    SourceSpan span;
    std::optional<std::size_t> row;  // CastError only
};

struct PlotRequest {
    std::string table;
    std::string column;
    dsl::PlotKind kind = dsl::PlotKind::histogram;
};

struct ExecResult {
    bool ok = true;
    std::optional<ExecError> error;
    std::uint64_t epoch = 0;
    /// Names whose fingerprint differs from the previous epoch, including new
    /// bindings and a new temporary output. Sorted by name.
    std::vector<std::string> changed;
    /// Names that no longer exist, e.g. an expired temporary output.
    std::vector<std::string> removed;
    std::vector<PlotRequest> plots;
    std::size_t statements_completed = 0;
};

/// A variable environment of named tables mutated by executing DSL source.
/// Single writer: callers serialise execute/reset/pin.
class Session {
public:
    explicit Session(std::filesystem::path base_dir = std::filesystem::current_path(), CsvOptions csv = {});

    /// Parses and runs `source`. Each call advances the epoch by one. On an
    /// evaluation error, bindings made by earlier statements of the same call
    /// persist. A bare table expression becomes the temporary output; the
    /// previous temporary output is always dropped.
    ExecResult execute(std::string_view source);

    /// Clears every binding, pin and the temporary output, and advances the
    /// epoch. Returns the names that were live, sorted.
    std::vector<std::string> reset();

    /// Throws NameError for names that are not live.
    void pin(const std::string& name, bool pinned);

    [[nodiscard]] std::uint64_t epoch() const noexcept { return epoch_; }
    [[nodiscard]] const std::map<std::string, Binding>& env() const noexcept { return env_; }
    [[nodiscard]] const std::optional<TempOutput>& temp_output() const noexcept { return temp_; }
    [[nodiscard]] const std::set<std::string>& pinned() const noexcept { return pinned_; }

    /// Bindings (by name) followed by the temporary output, if any.
    [[nodiscard]] std::vector<TableEntry> tables() const;

    /// Looks up a binding, then the temporary output. Null when absent.
    [[nodiscard]] TablePtr find(std::string_view name) const;

    [[nodiscard]] const std::filesystem::path& base_dir() const noexcept { return base_dir_; }
    void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }

private:
    void run_statement(const dsl::Statement& st, ExecResult& result);

    std::filesystem::path base_dir_;
    CsvOptions csv_;
    std::uint64_t epoch_ = 0;
    std::map<std::string, Binding> env_;
    std::optional<TempOutput> temp_;
    std::set<std::string> pinned_;
};

}  // namespace liveprof
