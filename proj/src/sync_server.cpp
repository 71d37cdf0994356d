#include "liveprof/sync_server.hpp"

#include <future>

namespace liveprof {

std::vector<TableProfile> order_profiles(std::vector<TableProfile> profiles, const OrderingPolicy& policy) {
    order_by_policy(profiles, policy, [](const TableProfile& p) -> const std::string& { return p.table_name; },
                    [](const TableProfile& p) { return p.epoch; });
    return profiles;
}

namespace {

[[noreturn]] void protocol_error(const std::string& message) { throw Error("ProtocolError", message); }

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) protocol_error(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::string string_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_string()) protocol_error(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

double number_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number()) protocol_error(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

bool bool_field(const Json& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(key);
    if (!v.is_boolean()) protocol_error(std::string("field '") + key + "' must be a boolean");
    return v.get<bool>();
}

Json error_message(const Json& id, const std::string& kind, const std::string& message) {
    Json j;
    j["type"] = "error";
    j["id"] = id;
    j["kind"] = kind;
    j["message"] = message;
    return j;
}

Json ack_message(const Json& id) {
    Json j;
    j["type"] = "ack";
    j["id"] = id;
    return j;
}

Json removed_message(std::uint64_t epoch, const std::vector<std::string>& names) {
    Json j;
    j["type"] = "removed";
    j["epoch"] = epoch;
    j["names"] = names;
    return j;
}

Json exec_result_message(const Json& id, const ExecResult& r) {
    Json j;
    j["type"] = "exec_result";
    j["id"] = id;
    j["ok"] = r.ok;
    j["epoch"] = r.epoch;
    j["changed"] = r.changed;
    j["removed"] = r.removed;
    Json plots = Json::array();
    for (const auto& p : r.plots) {
        Json pj;
        pj["table"] = p.table;
        pj["column"] = p.column;
        pj["kind"] = dsl::to_string(p.kind);
        plots.push_back(std::move(pj));
    }
    j["plots"] = std::move(plots);
    if (r.error) {
        Json e;
        e["kind"] = r.error->kind;
        e["message"] = r.error->message;
        e["line"] = r.error->span.line;
        e["column"] = r.error->span.column;
        e["length"] = r.error->span.length;
        if (r.error->row) e["row"] = *r.error->row;
        j["error"] = std::move(e);
    }
    return j;
}

}  // namespace

ExportRequest export_request_from_json(const Json& j) {
    ExportRequest r;
    const std::string kind = string_field(j, "kind");
    r.table = string_field(j, "table");
    r.column = string_field(j, "column");
    if (kind == "cat_value") {
        const Json& v = field(j, "value");
        if (v.is_null()) {
            r.params = CategoricalSelection{std::nullopt};
        } else if (v.is_string()) {
            r.params = CategoricalSelection{v.get<std::string>()};
        } else {
            protocol_error("field 'value' must be a string or null");
        }
    } else if (kind == "num_range") {
        r.params = NumericRangeSelection{number_field(j, "lo"), number_field(j, "hi"), bool_field(j, "last_bin", false)};
    } else if (kind == "outliers_sigma") {
        r.params = OutlierTemplate{OutlierMethod::sigma};
    } else if (kind == "outliers_iqr") {
        r.params = OutlierTemplate{OutlierMethod::iqr};
    } else if (kind == "duplicates") {
        r.params = DuplicatesTemplate{};
    } else if (kind == "plot") {
        r.params = PlotTemplate{};
    } else {
        protocol_error("unknown export kind '" + kind + "'");
    }
    return r;
}

Json to_json(const ExportRequest& r) {
    Json j;
    if (const auto* sel = std::get_if<CategoricalSelection>(&r.params)) {
        j["kind"] = "cat_value";
        j["table"] = r.table;
        j["column"] = r.column;
        j["value"] = sel->value ? Json(*sel->value) : Json(nullptr);
    } else if (const auto* range = std::get_if<NumericRangeSelection>(&r.params)) {
        j["kind"] = "num_range";
        j["table"] = r.table;
        j["column"] = r.column;
        j["lo"] = range->lo;
        j["hi"] = range->hi;
        j["last_bin"] = range->last_bin;
    } else if (const auto* out = std::get_if<OutlierTemplate>(&r.params)) {
        j["kind"] = out->method == OutlierMethod::sigma ? "outliers_sigma" : "outliers_iqr";
        j["table"] = r.table;
        j["column"] = r.column;
    } else {
        j["kind"] = std::holds_alternative<DuplicatesTemplate>(r.params) ? "duplicates" : "plot";
        j["table"] = r.table;
        j["column"] = r.column;
    }
    return j;
}

SyncServer::SyncServer(Session session) : session_(std::move(session)) { sync_policy_pins(); }

ClientId SyncServer::connect(Sink sink) {
    const ClientId id = next_client_++;
    clients_.emplace(id, Client{std::move(sink), false});
    return id;
}

void SyncServer::disconnect(ClientId client) { clients_.erase(client); }

std::size_t SyncServer::subscriber_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [id, c] : clients_) n += c.subscribed ? 1 : 0;
    return n;
}

void SyncServer::send(ClientId client, const Json& message) {
    auto it = clients_.find(client);
    if (it != clients_.end() && it->second.sink) it->second.sink(dump_canonical(message));
}

void SyncServer::broadcast(const Json& message) {
    const std::string line = dump_canonical(message);
    for (auto& [id, c] : clients_) {
        if (c.subscribed && c.sink) c.sink(line);
    }
}

void SyncServer::handle(ClientId client, std::string_view line) {
    Json message;
    try {
        message = Json::parse(line);
    } catch (const Json::parse_error& e) {
        send(client, error_message(nullptr, "ProtocolError", std::string("invalid JSON: ") + e.what()));
        return;
    }
    dispatch(client, message);
}

void SyncServer::dispatch(ClientId client, const Json& message) {
    const Json id = message.is_object() && message.contains("id") ? message.at("id") : Json(nullptr);
    try {
        const std::string type = string_field(message, "type");
        if (type == "exec") {
            on_exec(client, id, message);
        } else if (type == "subscribe") {
            on_subscribe(client);
        } else if (type == "unsubscribe") {
            if (auto it = clients_.find(client); it != clients_.end()) it->second.subscribed = false;
            send(client, ack_message(id));
        } else if (type == "export") {
            on_export(client, id, message);
        } else if (type == "pin") {
            on_pin(client, id, message);
        } else if (type == "sort") {
            on_sort(client, id, message);
        } else if (type == "reset") {
            on_reset(client, id);
        } else {
            protocol_error("unknown message type '" + type + "'");
        }
    } catch (const Error& e) {
        send(client, error_message(id, e.kind(), e.what()));
    }
}

void SyncServer::on_exec(ClientId client, const Json& id, const Json& message) {
    const std::string source = string_field(message, "source");
    const ExecResult result = session_.execute(source);
    sync_policy_pins();
    send(client, exec_result_message(id, result));
    if (subscriber_count() == 0) return;  // profiles stay stale until the next subscribe

    if (!result.removed.empty()) broadcast(removed_message(result.epoch, result.removed));
    std::vector<Json> profiles;
    for (const auto& entry : ordered_entries()) {
        if (std::binary_search(result.changed.begin(), result.changed.end(), entry.name)) {
            profiles.push_back(profile_of(entry));
        }
    }
    prune_cache();
    const std::vector<std::string> order = ordered_names();
    broadcast(profiles_message(result.epoch, order, profiles));
}

void SyncServer::on_subscribe(ClientId client) {
    auto it = clients_.find(client);
    if (it == clients_.end()) return;
    it->second.subscribed = true;
    send(client, snapshot());
}

Json SyncServer::snapshot() {
    std::vector<Json> profiles;
    for (const auto& entry : ordered_entries()) profiles.push_back(profile_of(entry));
    prune_cache();
    const std::vector<std::string> order = ordered_names();
    return profiles_message(session_.epoch(), order, profiles);
}

void SyncServer::on_export(ClientId client, const Json& id, const Json& message) {
    const ExportRequest request = export_request_from_json(field(message, "request"));
    const Snippet s = generate_export(session_, request);
    Json j;
    j["type"] = "snippet";
    j["id"] = id;
    j["text"] = s.text;
    j["new_name"] = s.new_name;
    send(client, j);
}

void SyncServer::on_pin(ClientId client, const Json& id, const Json& message) {
    session_.pin(string_field(message, "table"), bool_field(message, "pinned", true));
    sync_policy_pins();
    send(client, ack_message(id));
    Json j;
    j["type"] = "order";
    j["epoch"] = session_.epoch();
    j["order"] = ordered_names();
    broadcast(j);
}

void SyncServer::on_sort(ClientId client, const Json& id, const Json& message) {
    const auto mode = sort_mode_from_string(string_field(message, "mode"));
    if (!mode) protocol_error("mode must be 'recency' or 'alphabetical'");
    policy_.mode = *mode;
    send(client, ack_message(id));
    Json j;
    j["type"] = "order";
    j["epoch"] = session_.epoch();
    j["order"] = ordered_names();
    broadcast(j);
}

void SyncServer::on_reset(ClientId client, const Json& id) {
    const std::vector<std::string> names = session_.reset();
    sync_policy_pins();
    cache_.clear();
    send(client, ack_message(id));
    broadcast(removed_message(session_.epoch(), names));
    broadcast(profiles_message(session_.epoch(), {}, {}));
}

const Json& SyncServer::profile_of(const TableEntry& entry) {
    auto it = cache_.find(entry.name);
    if (it != cache_.end() && it->second.fingerprint == entry.fingerprint &&
        it->second.last_epoch == entry.last_epoch && it->second.temporary == entry.temporary) {
        return it->second.json;
    }
    ++computations_;
    CachedProfile cached{entry.fingerprint, entry.last_epoch, entry.temporary,
                         to_json(profile_table(*entry.table, entry.last_epoch, entry.temporary))};
    return cache_.insert_or_assign(entry.name, std::move(cached)).first->second.json;
}

std::vector<TableEntry> SyncServer::ordered_entries() const {
    std::vector<TableEntry> entries = session_.tables();
    order_by_policy(entries, policy_, [](const TableEntry& e) -> const std::string& { return e.name; },
                    [](const TableEntry& e) { return e.last_epoch; });
    return entries;
}

std::vector<std::string> SyncServer::ordered_names() const {
    std::vector<std::string> names;
    for (const auto& e : ordered_entries()) names.push_back(e.name);
    return names;
}

void SyncServer::sync_policy_pins() { policy_.pinned = session_.pinned(); }

void SyncServer::prune_cache() {
    for (auto it = cache_.begin(); it != cache_.end();) {
        if (session_.find(it->first)) {
            ++it;
        } else {
            it = cache_.erase(it);
        }
    }
}

ServerLoop::ServerLoop(Session session) : server_(std::move(session)), thread_([this] { worker(); }) {}

ServerLoop::~ServerLoop() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    cv_.notify_all();
    thread_.join();
}

void ServerLoop::enqueue(std::function<void()> task) {
    {
        std::lock_guard lock(mutex_);
        queue_.push_back(std::move(task));
    }
    cv_.notify_one();
}

void ServerLoop::worker() {
    while (true) {
        std::function<void()> task;
        {
            std::unique_lock lock(mutex_);
            cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
            if (queue_.empty()) return;
            task = std::move(queue_.front());
            queue_.pop_front();
            busy_ = true;
        }
        task();
        {
            std::lock_guard lock(mutex_);
            busy_ = false;
        }
        idle_cv_.notify_all();
    }
}

ClientId ServerLoop::connect(SyncServer::Sink sink) {
    ClientId id = 0;
    run_sync([&](SyncServer& s) { id = s.connect(std::move(sink)); });
    return id;
}

void ServerLoop::disconnect(ClientId client) {
    enqueue([this, client] { server_.disconnect(client); });
}

void ServerLoop::post(ClientId client, std::string line) {
    enqueue([this, client, line = std::move(line)] { server_.handle(client, std::string_view(line)); });
}

void ServerLoop::run_sync(const std::function<void(SyncServer&)>& fn) {
    std::promise<void> done;
    auto future = done.get_future();
    enqueue([&] {
        try {
            fn(server_);
            done.set_value();
        } catch (...) {
            done.set_exception(std::current_exception());
        }
    });
    future.get();
}

void ServerLoop::wait_idle() {
    std::unique_lock lock(mutex_);
    idle_cv_.wait(lock, [&] { return queue_.empty() && !busy_; });
}

}  // namespace liveprof
