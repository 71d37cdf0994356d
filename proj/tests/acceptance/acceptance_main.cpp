// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Independent of GTest so the output stays one line per check.

#include "liveprof/csv.hpp"
#include "liveprof/dsl/parser.hpp"
#include "liveprof/exports.hpp"
#include "liveprof/ordering.hpp"
#include "liveprof/profile.hpp"
#include "liveprof/profile_json.hpp"
#include "liveprof/report.hpp"
#include "liveprof/session.hpp"
#include "liveprof/sync_server.hpp"
#include "oracle/brute_force.hpp"
#include "support/generators.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace liveprof;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

/// Collects failure descriptions; a criterion passes when none were recorded.
struct Checks {
    std::vector<std::string> failures;
    std::string detail;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f s", s);
    return buf;
}

bool close_rel(double a, double b, double tol = 1e-9) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return a == b || std::fabs(a - b) / scale <= tol;
}

/// Scratch directory removed on scope exit.
struct TempDir {
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("liveprof_accept_" + tag + "_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path path;
};

struct Inbox {
    std::vector<Json> messages;

    SyncServer::Sink sink() {
        return [this](const std::string& line) { messages.push_back(Json::parse(line)); };
    }

    std::vector<Json> of_type(const std::string& type) const {
        std::vector<Json> out;
        for (const auto& m : messages) {
            if (m.at("type") == type) out.push_back(m);
        }
        return out;
    }
};

Json exec_message(const std::string& source) { return Json{{"type", "exec"}, {"source", source}}; }

std::vector<std::size_t> row_ids(const Table& t) {
    std::vector<std::size_t> rows;
    for (const Cell& c : t.column("row").values) rows.push_back(static_cast<std::size_t>(std::get<std::int64_t>(c)));
    return rows;
}

void oracle_equivalence(Checks& c) {
    constexpr int kNumeric = 1000;
    constexpr int kCategorical = 1000;
    const auto start = Clock::now();
    testsupport::Rng rng(20231029);
    for (int rep = 0; rep < kNumeric; ++rep) {
        const auto col = testsupport::random_numeric(rng, 1000);
        const Column column = testsupport::to_column(col);
        const auto p = oracle::present(col.values);
        const std::string tag = "numeric column " + std::to_string(rep) + ": ";

        const Histogram h = numeric_histogram(column);
        const oracle::Bins bins = oracle::histogram(p.values, kNumericMaxBins);
        c.expect(h.bin_edges == bins.edges, tag + "histogram edges");
        c.expect(h.counts == bins.counts, tag + "histogram counts");
        c.expect(outliers_sigma(column).rows == oracle::sigma_rows(p, kSigmaFactor), tag + "sigma outliers");
        c.expect(outliers_iqr(column).rows == oracle::iqr_rows(p, kIqrFactor), tag + "IQR outliers");

        const NumericSummary s = numeric_summary(column);
        c.expect(s.n_nonnull == p.values.size(), tag + "n_nonnull");
        if (p.values.empty()) {
            c.expect(s.empty, tag + "empty flag");
            continue;
        }
        const oracle::Summary o = oracle::summary(p.values);
        c.expect(close_rel(s.min, o.min) && close_rel(s.max, o.max), tag + "min/max");
        c.expect(close_rel(s.q1, o.q1) && close_rel(s.median, o.median) && close_rel(s.q3, o.q3), tag + "quartiles");
        c.expect(close_rel(s.mean, o.mean), tag + "mean");
        c.expect(close_rel(s.std, o.std), tag + "std");
        c.expect(s.n_pos == o.n_pos && s.n_zero == o.n_zero && s.n_neg == o.n_neg, tag + "sign counts");
        c.expect(to_string(s.sortedness) == o.sortedness, tag + "sortedness");
        c.expect(s.outliers_sigma == oracle::sigma_rows(p, kSigmaFactor).size(), tag + "sigma count");
        c.expect(s.outliers_iqr == oracle::iqr_rows(p, kIqrFactor).size(), tag + "IQR count");
    }
    for (int rep = 0; rep < kCategorical; ++rep) {
        const auto raw = testsupport::random_strings(rng, 1000);
        const CategoricalSummary s = categorical_profile(testsupport::to_column(raw));
        const oracle::Counts o = oracle::value_counts(raw, kTopValues);
        const std::string tag = "categorical column " + std::to_string(rep) + ": ";
        bool top_ok = s.top_values.size() == o.top.size();
        for (std::size_t i = 0; top_ok && i < o.top.size(); ++i) {
            top_ok = s.top_values[i].value == o.top[i].first && s.top_values[i].count == o.top[i].second;
        }
        c.expect(top_ok, tag + "top-10");
        c.expect(s.cardinality == o.cardinality, tag + "cardinality");
        c.expect(s.duplicate_rows == o.duplicate_rows, tag + "duplicate_rows");
    }
    const double elapsed = seconds_since(start);
    c.expect(elapsed < 60.0, "runtime " + fmt_seconds(elapsed) + " exceeds 60 s");
    c.detail = std::to_string(kNumeric + kCategorical) + " columns, " + fmt_seconds(elapsed);
}

void sqft_cleanup(Checks& c) {
    TempDir dir("sqft");
    testsupport::write_sqft_fixture(dir.path / "listings.csv");
    Session session(dir.path);
    c.expect(session.execute("load \"listings.csv\" as df").ok, "load failed");
    const ColumnProfile before = profile_table(*session.find("df")).columns.at(1);
    c.expect(before.stype == SemanticType::categorical, "sqft did not infer as categorical");

    const ExecResult r = session.execute("df = mutate df set sqft = try_int(sqft)");
    c.expect(r.ok, "mutate failed");
    if (!r.ok) return;
    const ColumnProfile after = profile_table(*session.find("df")).columns.at(1);
    c.expect(is_numeric(after.stype), "sqft is not numeric after try_int");
    c.expect(after.n_null - before.n_null == 3, "null count rose by " + std::to_string(after.n_null - before.n_null));
    const double delta = after.null_fraction - before.null_fraction;
    c.expect(delta == 0.003, "null_fraction rose by " + std::to_string(delta));
    std::ostringstream d;
    d << "null_fraction " << before.null_fraction << " -> " << after.null_fraction;
    c.detail = d.str();
}

void county_selection(Checks& c) {
    TempDir dir("county");
    testsupport::write_apartments_fixture(dir.path / "apartments.csv");
    Session session(dir.path);
    c.expect(session.execute("load \"apartments.csv\" as apartments").ok, "load failed");
    const Table& table = *session.find("apartments");
    const CategoricalSummary summary = categorical_profile(table.column("county"));
    std::size_t dashes = 0;
    for (const auto& vc : summary.top_values) {
        if (vc.value == "---") dashes = vc.count;
    }
    c.expect(dashes > 0, "\"---\" is not a top value");

    const Snippet s = export_categorical_selection(session, "apartments", "county", std::string("---"));
    try {
        (void)dsl::parse(s.text);
    } catch (const Error& e) {
        c.expect(false, "snippet does not parse: " + std::string(e.what()));
        return;
    }
    const ExecResult r = session.execute(s.text);
    c.expect(r.ok, "snippet failed to execute: " + s.text);
    const TablePtr selected = session.find(s.new_name);
    c.expect(selected != nullptr, "snippet binds no table " + s.new_name);
    if (!selected) return;
    bool only_dashes = true;
    for (const Cell& cell : selected->column("county").values) {
        only_dashes = only_dashes && cell == Cell{std::string("---")};
    }
    c.expect(only_dashes, "selection contains other counties");
    c.expect(selected->nrows() == dashes, "selection has " + std::to_string(selected->nrows()) + " rows, expected " +
                                              std::to_string(dashes));
    c.detail = std::to_string(selected->nrows()) + " rows via `" + s.text + "`";
}

void outlier_round_trip(Checks& c) {
    constexpr int kColumns = 200;
    TempDir dir("outliers");
    Session session(dir.path);
    testsupport::Rng rng(77);
    int checked = 0;
    for (int rep = 0; rep < kColumns; ++rep) {
        const testsupport::NumericColumn col = testsupport::random_numeric(rng, 400);
        {
            std::ofstream out(dir.path / "rt.csv");
            out.precision(17);
            out << "row,v\n";
            for (std::size_t i = 0; i < col.values.size(); ++i) {
                out << i << ',';
                if (col.values[i]) {
                    if (col.integral) out << static_cast<std::int64_t>(*col.values[i]);
                    else out << *col.values[i];
                }
                out << '\n';
            }
        }
        c.expect(session.execute("load \"rt.csv\" as rt").ok, "load failed");
        const Column& v = session.find("rt")->column("v");
        if (!is_numeric(v.stype)) continue;  // empty or all-null column
        ++checked;
        for (const auto method : {OutlierMethod::sigma, OutlierMethod::iqr}) {
            const OutlierSet expected = method == OutlierMethod::sigma ? outliers_sigma(v) : outliers_iqr(v);
            const Snippet s = export_outlier_template(session, "rt", "v", method);
            const ExecResult r = session.execute(s.text);
            c.expect(r.ok, "snippet failed: " + s.text);
            if (!r.ok) continue;
            c.expect(row_ids(*session.find(s.new_name)) == expected.rows,
                     "column " + std::to_string(rep) + ": row set differs for " + s.text);
        }
    }

    std::ofstream(dir.path / "hand.csv") << "v\n1\n2\n3\n4\n5\n6\n7\n8\n100\n";
    c.expect(session.execute("load \"hand.csv\" as hand").ok, "load failed");
    const Snippet s = export_outlier_template(session, "hand", "v", OutlierMethod::iqr);
    c.expect(session.execute(s.text).ok, "hand snippet failed");
    const TablePtr out = session.find(s.new_name);
    c.expect(out && out->column("v").values == std::vector<Cell>{Cell{std::int64_t{100}}},
             "[1..8, 100] IQR snippet did not return exactly 100");
    c.detail = std::to_string(checked) + " columns x 2 methods, plus [1..8, 100]";
}

void temp_profile_lifecycle(Checks& c) {
    TempDir dir("temp");
    std::ofstream(dir.path / "d.csv") << "id,county\n1,---\n2,Marin\n3,---\n";
    SyncServer server{Session(dir.path)};
    Inbox inbox;
    const ClientId client = server.connect(inbox.sink());
    server.dispatch(client, exec_message("load \"d.csv\" as df"));
    server.dispatch(client, Json{{"type", "subscribe"}});
    inbox.messages.clear();

    server.dispatch(client, exec_message("filter df where county == \"---\""));
    const std::string expected = temp_output_name(server.session().epoch());
    c.expect(expected == "Output of statement 2", "temporary name is " + expected);
    const auto profiles = inbox.of_type("profiles");
    bool found = false;
    for (const auto& m : profiles) {
        for (const auto& p : m.at("profiles")) {
            found = found || (p.at("table_name") == expected && p.at("temporary") == true && p.at("nrows") == 2);
        }
    }
    c.expect(found, "no temporary profile named \"" + expected + "\" was broadcast");
    inbox.messages.clear();

    server.dispatch(client, exec_message("x = head df 1"));
    const auto removed = inbox.of_type("removed");
    c.expect(removed.size() == 1 && removed[0].at("names") == Json::array({expected}),
             "next execution did not broadcast the removal");
    bool still_listed = false;
    for (const auto& p : server.snapshot().at("profiles")) still_listed = still_listed || p.at("table_name") == expected;
    c.expect(!still_listed, "temporary profile still in snapshot");
    c.detail = "\"" + expected + "\" broadcast, then removed";
}

void ordering_and_pinning(Checks& c) {
    constexpr int kConfigs = 2000;
    testsupport::Rng rng(5);
    for (int rep = 0; rep < kConfigs; ++rep) {
        const std::size_t n = rng() % 16;
        std::vector<OrderKey> keys;
        OrderingPolicy policy;
        policy.mode = rng() % 2 ? SortMode::recency : SortMode::alphabetical;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string name = "t" + std::to_string(rng() % 50) + "_" + std::to_string(i);
            keys.push_back({name, rng() % 6});
            if (rng() % 4 == 0) policy.pinned.insert(name);
        }
        const auto ordered = order_keys(keys, policy);
        const std::string tag = "configuration " + std::to_string(rep) + ": ";
        bool ok = ordered.size() == keys.size();
        for (std::size_t i = 0; ok && i + 1 < ordered.size(); ++i) {
            const auto& a = ordered[i];
            const auto& b = ordered[i + 1];
            const bool pa = policy.pinned.count(a.name) > 0;
            const bool pb = policy.pinned.count(b.name) > 0;
            if (pa != pb) {
                ok = pa;
            } else if (policy.mode == SortMode::recency) {
                ok = a.last_epoch > b.last_epoch || (a.last_epoch == b.last_epoch && a.name < b.name);
            } else {
                ok = a.name < b.name;
            }
        }
        c.expect(ok, tag + "policy violated");
        // A total order: any permutation of the input yields the same output.
        std::vector<OrderKey> shuffled = keys;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        auto names = [](const std::vector<OrderKey>& ks) {
            std::vector<std::string> out;
            for (const auto& k : ks) out.push_back(k.name);
            return out;
        };
        c.expect(names(order_keys(shuffled, policy)) == names(ordered), tag + "order depends on input order");
    }
    c.detail = std::to_string(kConfigs) + " configurations";
}

void laziness(Checks& c) {
    TempDir dir("lazy");
    std::ofstream(dir.path / "a.csv") << "id,price\n1,10\n2,-3\n3,7\n4,7\n";
    std::ofstream(dir.path / "b.csv") << "k\nx\ny\n";
    const std::vector<std::string> statements = {
        "load \"a.csv\" as a",         "load \"b.csv\" as b",           "a = filter a where price > 0",
        "c = head a 2",                "load \"a.csv\" as a",           "head b 1",
        "c = sort a by price desc",    "b = dedupe b",                  "load \"a.csv\" as a\nc = head a 1",
        "d = select a cols id",        "filter a where price < 0",      "a = head a 4",
    };

    SyncServer idle{Session(dir.path)};
    Inbox idle_inbox;
    const ClientId idle_client = idle.connect(idle_inbox.sink());
    for (int i = 0; i < 100; ++i) idle.dispatch(idle_client, exec_message(statements[i % statements.size()]));
    c.expect(idle.profile_computations() == 0,
             std::to_string(idle.profile_computations()) + " computations with no subscriber");

    SyncServer live{Session(dir.path)};
    Inbox inbox;
    const ClientId client = live.connect(inbox.sink());
    live.dispatch(client, Json{{"type", "subscribe"}});
    std::size_t total_changed = 0;
    for (int i = 0; i < 100; ++i) {
        inbox.messages.clear();
        const std::size_t before = live.profile_computations();
        live.dispatch(client, exec_message(statements[i % statements.size()]));
        const auto results = inbox.of_type("exec_result");
        const std::size_t changed = results.empty() ? 0 : results[0].at("changed").size();
        total_changed += changed;
        const std::size_t spent = live.profile_computations() - before;
        c.expect(spent == changed, "epoch " + std::to_string(live.session().epoch()) + ": " + std::to_string(spent) +
                                       " computations for " + std::to_string(changed) + " changed tables");
    }
    c.detail = "0 computations idle; " + std::to_string(live.profile_computations()) + " computations for " +
               std::to_string(total_changed) + " changes while subscribed";
}

void reset_clears(Checks& c) {
    TempDir dir("reset");
    std::ofstream(dir.path / "a.csv") << "id\n1\n2\n";
    SyncServer server{Session(dir.path)};
    Inbox inbox;
    const ClientId client = server.connect(inbox.sink());
    server.dispatch(client, exec_message("load \"a.csv\" as x\ny = head x 1\nload \"a.csv\" as z\nhead x 1"));
    server.dispatch(client, Json{{"type", "pin"}, {"table", "y"}, {"pinned", true}});
    server.dispatch(client, Json{{"type", "subscribe"}});
    inbox.messages.clear();

    server.dispatch(client, Json{{"type", "reset"}});
    const auto removed = inbox.of_type("removed");
    const Json expected = Json::array({"Output of statement 1", "x", "y", "z"});
    Json names = removed.empty() ? Json::array() : removed[0].at("names");
    std::vector<std::string> sorted = names.get<std::vector<std::string>>();
    std::sort(sorted.begin(), sorted.end());
    c.expect(removed.size() == 1 && Json(sorted) == expected, "removed broadcast was " + names.dump());
    c.expect(server.snapshot().at("profiles").empty(), "snapshot not empty after reset");
    c.expect(server.session().env().empty() && !server.session().temp_output(), "session still holds tables");
    c.expect(server.session().pinned().empty(), "pins survived reset");
    c.detail = "removed " + names.dump();
}

std::string run_capture(const std::string& cmd, int& status) {
    std::string out;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        status = -1;
        return out;
    }
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
    status = ::pclose(pipe);
    return out;
}

void determinism(Checks& c) {
    TempDir dir("determinism");
    const fs::path csv = dir.path / "apartments.csv";
    testsupport::write_apartments_fixture(csv);
    const std::string cmd = std::string("'") + LIVEPROF_CLI + "' report '" + csv.string() + "' --format json";
    int s1 = 0;
    int s2 = 0;
    const std::string first = run_capture(cmd, s1);
    const std::string second = run_capture(cmd, s2);
    c.expect(s1 == 0 && s2 == 0, "report exited with a nonzero status");
    c.expect(!first.empty() && first == second, "two report runs differ");

    SyncServer server{Session(dir.path)};
    Inbox inbox;
    const ClientId client = server.connect(inbox.sink());
    server.dispatch(client, exec_message("load \"apartments.csv\" as " + table_name_for(csv)));
    server.dispatch(client, Json{{"type", "subscribe"}});
    const auto snapshots = inbox.of_type("profiles");
    const std::string live = snapshots.empty() ? std::string() : dump_canonical(snapshots.back()) + "\n";
    c.expect(live == first, "report differs from the live snapshot payload");
    c.detail = std::to_string(first.size()) + " bytes, identical across runs and to the live payload";
}

void responsiveness(Checks& c) {
    TempDir dir("scale");
    const fs::path csv = dir.path / "big.csv";
    testsupport::write_apartments_fixture(csv, 100000, 11);
    const Table table = read_csv(csv, {}, "big");
    c.expect(table.nrows() == 100000 && table.ncols() == 13, "fixture is not 100000 x 13");
    const double limit = std::getenv("CI") ? 2.0 : 1.0;
    const auto start = Clock::now();
    const TableProfile p = profile_table(table);
    const double elapsed = seconds_since(start);
    c.expect(p.columns.size() == 13, "profile has wrong column count");
    c.expect(elapsed < limit, "profiling took " + fmt_seconds(elapsed) + ", limit " + fmt_seconds(limit));
    c.detail = "100000 x 13 in " + fmt_seconds(elapsed) + ", limit " + fmt_seconds(limit);
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Checks&)>>> criteria = {
        {"oracle-equivalence", oracle_equivalence},
        {"sqft-cleanup", sqft_cleanup},
        {"county-selection-export", county_selection},
        {"outlier-round-trip", outlier_round_trip},
        {"temp-profile-lifecycle", temp_profile_lifecycle},
        {"ordering-and-pinning", ordering_and_pinning},
        {"laziness", laziness},
        {"reset", reset_clears},
        {"determinism", determinism},
        {"responsiveness", responsiveness},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Checks c;
        try {
            run(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        if (c.failures.empty()) {
            std::cout << "PASS " << name << " (" << c.detail << ")\n";
        } else {
            ++failed;
            std::cout << "FAIL " << name << ": " << c.failures.front();
            if (c.failures.size() > 1) std::cout << " (+" << c.failures.size() - 1 << " more)";
            std::cout << '\n';
        }
        std::cout.flush();
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
    return failed == 0 ? 0 : 1;
}
