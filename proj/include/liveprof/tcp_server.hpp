#pragma once

#include "liveprof/sync_server.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace liveprof {

/// Socket front end for a ServerLoop. One listening port serves both the
/// line-delimited JSON protocol and plain HTTP: a connection whose first line
/// is `GET ...` gets one HTTP response (`/snapshot` returns the profiles
/// payload, `/` the static page) and is closed.
class TcpServer {
public:
    TcpServer(ServerLoop& loop, std::string index_html);
    ~TcpServer();

    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    /// Binds 127.0.0.1:`port` (0 picks a free port). Throws IoError when the
    /// port is unavailable.
    void listen(std::uint16_t port);

    /// Accepts connections until stop() is called.
    void serve();
    /// Stops accepting and shuts down every open connection.
    void stop();

    [[nodiscard]] std::uint16_t port() const noexcept { return port_; }

private:
    struct Connection;

    void handle_connection(int fd);
    void serve_http(int fd, const std::string& request_line);
    void close_connection(int fd);

    ServerLoop& loop_;
    std::string index_html_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::mutex threads_mutex_;
    std::vector<std::thread> threads_;
    std::set<int> open_fds_;
};

}  // namespace liveprof
