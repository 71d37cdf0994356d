#include "liveprof/profile.hpp"
#include "liveprof/profile_json.hpp"
#include "liveprof/sync_server.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace liveprof;
namespace fs = std::filesystem;

namespace {

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

    void clear() { messages.clear(); }
};

class SyncServerTest : public ::testing::Test {
protected:
    SyncServerTest() : server_(Session(make_dir())) {}

    static fs::path make_dir() {
        const fs::path dir = fs::temp_directory_path() / ("liveprof_sync_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        std::ofstream(dir / "apts.csv") << "id,county,price\n1,---,10\n2,Marin,20\n3,---,-5\n";
        std::ofstream(dir / "other.csv") << "k\na\nb\n";
        return dir;
    }

    void exec(ClientId c, const std::string& source, int id = 1) {
        server_.dispatch(c, Json{{"type", "exec"}, {"id", id}, {"source", source}});
    }

    SyncServer server_;
};

std::vector<std::string> profile_names(const Json& msg) {
    std::vector<std::string> out;
    for (const auto& p : msg.at("profiles")) out.push_back(p.at("table_name").get<std::string>());
    return out;
}

}  // namespace

TEST_F(SyncServerTest, SubscribeToEmptySession) {
    Inbox inbox;
    const ClientId c = server_.connect(inbox.sink());
    server_.handle(c, R"({"type":"subscribe","id":1})");
    ASSERT_EQ(inbox.messages.size(), 1u);
    EXPECT_EQ(inbox.messages[0].at("type"), "profiles");
    EXPECT_TRUE(inbox.messages[0].at("profiles").empty());
    EXPECT_TRUE(inbox.messages[0].at("order").empty());
}

TEST_F(SyncServerTest, NoSubscriberNoProfiling) {
    Inbox inbox;
    const ClientId c = server_.connect(inbox.sink());
    for (int i = 0; i < 20; ++i) exec(c, "load \"apts.csv\" as t" + std::to_string(i % 3) + "\nx = head t0 " + std::to_string(i % 4 + 1), i);
    EXPECT_EQ(server_.profile_computations(), 0u);
    EXPECT_EQ(inbox.of_type("exec_result").size(), 20u);
    EXPECT_TRUE(inbox.of_type("profiles").empty());
}

TEST_F(SyncServerTest, OneChangedTableOneComputation) {
    Inbox inbox;
    const ClientId c = server_.connect(inbox.sink());
    exec(c, "load \"apts.csv\" as df\nload \"other.csv\" as o");
    server_.handle(c, R"({"type":"subscribe"})");
    const std::size_t base = server_.profile_computations();
    EXPECT_EQ(base, 2u);
    inbox.clear();
    exec(c, "df = filter df where price > 0", 7);
    EXPECT_EQ(server_.profile_computations(), base + 1);
    const auto results = inbox.of_type("exec_result");
    ASSERT_EQ(results.size(), 1u);
    EXPECT_EQ(results[0].at("id"), 7);
    EXPECT_EQ(results[0].at("changed"), Json::array({"df"}));
    const auto profiles = inbox.of_type("profiles");
    ASSERT_EQ(profiles.size(), 1u);
    EXPECT_EQ(profile_names(profiles[0]), (std::vector<std::string>{"df"}));
    EXPECT_EQ(profiles[0].at("order"), Json::array({"df", "o"}));
    EXPECT_EQ(profiles[0].at("profiles")[0].at("nrows"), 2);
}

TEST_F(SyncServerTest, UnchangedExecComputesNothing) {
    Inbox inbox;
    const ClientId c = server_.connect(inbox.sink());
    exec(c, "load \"apts.csv\" as df");
    server_.handle(c, R"({"type":"subscribe"})");
    const std::size_t base = server_.profile_computations();
    exec(c, "load \"apts.csv\" as df");
    EXPECT_EQ(server_.profile_computations(), base);
}

TEST_F(SyncServerTest, SnapshotAfterDirtyPeriodIsFresh) {
    Inbox inbox;
    const ClientId c = server_.connect(inbox.sink());
    exec(c, "load \"apts.csv\" as df");
    server_.handle(c, R"({"type":"subscribe"})");
    server_.handle(c, R"({"type":"unsubscribe"})");
    exec(c, "df = filter df where price > 0\nb = head df 1\nc = head df 1");
    const std::size_t before = server_.profile_computations();
    const Json snap = server_.snapshot();
    EXPECT_EQ(server_.profile_computations(), before + 3);
    EXPECT_EQ(profile_names(snap), (std::vector<std::string>{"b", "c", "df"}));
    for (const auto& p : snap.at("profiles")) {
        const TablePtr t = server_.session().find(p.at("table_name").get<std::string>());
        const auto entry = server_.session().env().at(p.at("table_name").get<std::string>());
        EXPECT_EQ(p, to_json(profile_table(*t, entry.last_epoch, false)));
    }
}

TEST_F(SyncServerTest, SnapshotInRecencyOrder) {
    Inbox inbox;
    const ClientId c = server_.connect(inbox.sink());
    exec(c, "load \"apts.csv\" as a");
    exec(c, "load \"other.csv\" as c");
    exec(c, "load \"apts.csv\" as b");
    server_.handle(c, R"({"type":"subscribe"})");
    EXPECT_EQ(profile_names(inbox.of_type("profiles").back()), (std::vector<std::string>{"b", "c", "a"}));
}

TEST_F(SyncServerTest, TempOutputBroadcastAndRemoval) {
    Inbox inbox;
    const ClientId c = server_.connect(inbox.sink());
    exec(c, "load \"apts.csv\" as df");
    server_.handle(c, R"({"type":"subscribe"})");
    inbox.clear();
    exec(c, "filter df where county == \"---\"");
    const auto profiles = inbox.of_type("profiles");
    ASSERT_EQ(profiles.size(), 1u);
    EXPECT_EQ(profile_names(profiles[0]), (std::vector<std::string>{"Output of statement 2"}));
    EXPECT_EQ(profiles[0].at("profiles")[0].at("temporary"), true);
    inbox.clear();
    exec(c, "x = head df 1");
    const auto removed = inbox.of_type("removed");
    ASSERT_EQ(removed.size(), 1u);
    EXPECT_EQ(removed[0].at("names"), Json::array({"Output of statement 2"}));
    EXPECT_EQ(removed[0].at("epoch"), 3);
    EXPECT_EQ(inbox.of_type("profiles").at(0).at("order"), Json::array({"x", "df"}));
}

TEST_F(SyncServerTest, ResetBroadcastsRemovalAndEmptySnapshot) {
    Inbox a;
    Inbox b;
    const ClientId ca = server_.connect(a.sink());
    const ClientId cb = server_.connect(b.sink());
    exec(ca, "load \"apts.csv\" as x\nload \"apts.csv\" as y\nload \"other.csv\" as z");
    server_.handle(cb, R"({"type":"subscribe"})");
    b.clear();
    server_.handle(ca, R"({"type":"reset","id":9})");
    const auto removed = b.of_type("removed");
    ASSERT_EQ(removed.size(), 1u);
    EXPECT_EQ(removed[0].at("names"), Json::array({"x", "y", "z"}));
    const auto profiles = b.of_type("profiles");
    ASSERT_EQ(profiles.size(), 1u);
    EXPECT_TRUE(profiles[0].at("profiles").empty());
    EXPECT_TRUE(server_.snapshot().at("profiles").empty());
    EXPECT_EQ(a.of_type("ack").at(0).at("id"), 9);
}

TEST_F(SyncServerTest, PinAndSortBroadcastOrder) {
    Inbox inbox;
    const ClientId c = server_.connect(inbox.sink());
    exec(c, "load \"apts.csv\" as a\nload \"apts.csv\" as b");
    exec(c, "load \"other.csv\" as c");
    server_.handle(c, R"({"type":"subscribe"})");
    inbox.clear();
    server_.handle(c, R"({"type":"pin","id":2,"table":"a","pinned":true})");
    EXPECT_EQ(inbox.of_type("order").at(0).at("order"), Json::array({"a", "c", "b"}));
    server_.handle(c, R"({"type":"sort","id":3,"mode":"alphabetical"})");
    EXPECT_EQ(inbox.of_type("order").at(1).at("order"), Json::array({"a", "b", "c"}));
    EXPECT_EQ(profile_names(server_.snapshot()), (std::vector<std::string>{"a", "b", "c"}));
    server_.handle(c, R"({"type":"pin","id":4,"table":"a","pinned":false})");
    EXPECT_EQ(inbox.of_type("order").at(2).at("order"), Json::array({"a", "b", "c"}));
}

TEST_F(SyncServerTest, ExportReturnsSnippet) {
    Inbox inbox;
    const ClientId c = server_.connect(inbox.sink());
    exec(c, "load \"apts.csv\" as df");
    server_.handle(c, R"({"type":"export","id":5,"request":{"kind":"cat_value","table":"df","column":"county","value":"---"}})");
    const auto snippets = inbox.of_type("snippet");
    ASSERT_EQ(snippets.size(), 1u);
    EXPECT_EQ(snippets[0].at("id"), 5);
    EXPECT_EQ(snippets[0].at("text"), "df_sel = filter df where county == \"---\"");
    EXPECT_EQ(server_.session().env().size(), 1u);
}

TEST_F(SyncServerTest, ExportRequestJsonRoundTrip) {
    const std::vector<ExportRequest> requests = {
        {"t", "c", CategoricalSelection{"v"}},
        {"t", "c", CategoricalSelection{std::nullopt}},
        {"t", "c", NumericRangeSelection{1.5, 3, true}},
        {"t", "c", OutlierTemplate{OutlierMethod::iqr}},
        {"t", "c", DuplicatesTemplate{}},
        {"t", "c", PlotTemplate{}},
    };
    for (const auto& r : requests) EXPECT_EQ(to_json(export_request_from_json(to_json(r))), to_json(r));
}

TEST_F(SyncServerTest, ErrorsKeepConnectionUsable) {
    Inbox inbox;
    const ClientId c = server_.connect(inbox.sink());
    server_.handle(c, "not json");
    server_.handle(c, R"({"type":"teleport","id":1})");
    server_.handle(c, R"({"type":"export","id":2,"request":{"kind":"cat_value","table":"nope","column":"x","value":"a"}})");
    server_.handle(c, R"({"type":"pin","id":3,"table":"ghost"})");
    const auto errors = inbox.of_type("error");
    ASSERT_EQ(errors.size(), 4u);
    EXPECT_EQ(errors[1].at("id"), 1);
    EXPECT_EQ(errors[2].at("kind"), "UnknownTable");
    EXPECT_EQ(errors[3].at("kind"), "NameError");
    exec(c, "load \"apts.csv\" as df");
    EXPECT_EQ(inbox.of_type("exec_result").back().at("ok"), true);
}

TEST_F(SyncServerTest, ExecErrorReportedWithSpan) {
    Inbox inbox;
    const ClientId c = server_.connect(inbox.sink());
    exec(c, "x = filter nosuch where a > 0");
    const Json r = inbox.of_type("exec_result").at(0);
    EXPECT_EQ(r.at("ok"), false);
    EXPECT_EQ(r.at("error").at("kind"), "NameError");
    EXPECT_EQ(r.at("error").at("line"), 1);
    EXPECT_EQ(r.at("error").at("column"), 12);
    EXPECT_EQ(r.at("error").at("length"), 6);
}

TEST_F(SyncServerTest, BroadcastReachesEverySubscriberOnly) {
    Inbox sub;
    Inbox idle;
    const ClientId cs = server_.connect(sub.sink());
    const ClientId ci = server_.connect(idle.sink());
    server_.handle(cs, R"({"type":"subscribe"})");
    exec(ci, "load \"apts.csv\" as df");
    EXPECT_EQ(sub.of_type("profiles").size(), 2u);
    EXPECT_TRUE(idle.of_type("profiles").empty());
    server_.disconnect(cs);
    EXPECT_EQ(server_.subscriber_count(), 0u);
}

TEST(ServerLoop, SerialisesRequestsFromManyThreads) {
    const fs::path dir = fs::temp_directory_path() / ("liveprof_loop_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::ofstream(dir / "a.csv") << "v\n1\n2\n";
    ServerLoop loop{Session(dir)};
    std::mutex mutex;
    std::vector<std::uint64_t> epochs;
    const ClientId c = loop.connect([&](const std::string& line) {
        const Json j = Json::parse(line);
        std::lock_guard lock(mutex);
        if (j.at("type") == "exec_result") epochs.push_back(j.at("epoch").get<std::uint64_t>());
    });
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 25; ++i) {
                loop.post(c, Json{{"type", "exec"}, {"source", "load \"a.csv\" as t" + std::to_string(t)}}.dump());
            }
        });
    }
    for (auto& th : threads) th.join();
    loop.wait_idle();
    ASSERT_EQ(epochs.size(), 100u);
    for (std::size_t i = 0; i < epochs.size(); ++i) EXPECT_EQ(epochs[i], i + 1);
    fs::remove_all(dir);
}
