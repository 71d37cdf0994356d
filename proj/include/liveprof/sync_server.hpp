#pragma once

// The live update loop. Clients send line-delimited JSON requests; the server
// runs them against one Session and pushes profile updates to subscribers.
//
// Client -> server (every message may carry an "id", echoed in replies):
//   {"type":"exec","source":"..."}         -> exec_result, then broadcast
//   {"type":"subscribe"}                    -> profiles snapshot
//   {"type":"unsubscribe"}                  -> ack
//   {"type":"export","request":{...}}       -> snippet | error
//   {"type":"pin","table":"t","pinned":b}   -> ack, broadcast order
//   {"type":"sort","mode":"recency"}        -> ack, broadcast order
//   {"type":"reset"}                        -> ack, broadcast removed + profiles
//
// Server -> client:
//   exec_result{id, ok, epoch, changed, removed, plots, error?}
//   profiles{epoch, order, profiles}        order lists every live table
//   removed{epoch, names}
//   order{epoch, order}
//   snippet{id, text, new_name}
//   ack{id}
//   error{id, kind, message}

#include "liveprof/exports.hpp"
#include "liveprof/ordering.hpp"
#include "liveprof/profile.hpp"
#include "liveprof/profile_json.hpp"
#include "liveprof/session.hpp"

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace liveprof {

[[nodiscard]] std::vector<TableProfile> order_profiles(std::vector<TableProfile> profiles,
                                                       const OrderingPolicy& policy);

/// Parses the `request` object of an export message. Throws Error
/// ("ProtocolError") on missing or mistyped fields.
[[nodiscard]] ExportRequest export_request_from_json(const Json& j);
[[nodiscard]] Json to_json(const ExportRequest& r);

using ClientId = std::uint64_t;

/// Protocol state machine. Not thread-safe; ServerLoop serialises access.
class SyncServer {
public:
    using Sink = std::function<void(const std::string& line)>;

    explicit SyncServer(Session session = Session());

    ClientId connect(Sink sink);
    void disconnect(ClientId client);

    /// Handles one request line. Malformed input yields an error message to
    /// the sender; the connection stays usable.
    void handle(ClientId client, std::string_view line);
    void dispatch(ClientId client, const Json& message);

    /// Full `profiles` message for every live table in policy order,
    /// recomputing stale profiles first.
    [[nodiscard]] Json snapshot();

    [[nodiscard]] std::size_t subscriber_count() const noexcept;
    /// Number of profile_table calls made so far.
    [[nodiscard]] std::size_t profile_computations() const noexcept { return computations_; }

    [[nodiscard]] const Session& session() const noexcept { return session_; }
    [[nodiscard]] const OrderingPolicy& policy() const noexcept { return policy_; }

private:
    struct Client {
        Sink sink;
        bool subscribed = false;
    };

    struct CachedProfile {
        Fingerprint fingerprint;
        std::uint64_t last_epoch = 0;
        bool temporary = false;
        Json json;
    };

    void send(ClientId client, const Json& message);
    void broadcast(const Json& message);

    void on_exec(ClientId client, const Json& id, const Json& message);
    void on_subscribe(ClientId client);
    void on_export(ClientId client, const Json& id, const Json& message);
    void on_pin(ClientId client, const Json& id, const Json& message);
    void on_sort(ClientId client, const Json& id, const Json& message);
    void on_reset(ClientId client, const Json& id);

    const Json& profile_of(const TableEntry& entry);
    [[nodiscard]] std::vector<TableEntry> ordered_entries() const;
    [[nodiscard]] std::vector<std::string> ordered_names() const;
    void sync_policy_pins();
    void prune_cache();

    Session session_;
    OrderingPolicy policy_;
    std::map<ClientId, Client> clients_;
    ClientId next_client_ = 1;
    std::map<std::string, CachedProfile> cache_;
    std::size_t computations_ = 0;
};

/// Runs a SyncServer on a single executor thread. Requests from any thread are
/// queued and processed strictly in arrival order.
class ServerLoop {
public:
    explicit ServerLoop(Session session = Session());
    ~ServerLoop();

    ServerLoop(const ServerLoop&) = delete;
    ServerLoop& operator=(const ServerLoop&) = delete;

    ClientId connect(SyncServer::Sink sink);
    void disconnect(ClientId client);
    void post(ClientId client, std::string line);

    /// Runs `fn` on the executor and waits for it.
    void run_sync(const std::function<void(SyncServer&)>& fn);

    /// Blocks until every queued task has been processed.
    void wait_idle();

private:
    void worker();
    void enqueue(std::function<void()> task);

    SyncServer server_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::condition_variable idle_cv_;
    std::deque<std::function<void()>> queue_;
    bool busy_ = false;
    bool stopping_ = false;
    std::thread thread_;
};

}  // namespace liveprof
