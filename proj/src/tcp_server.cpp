#include "liveprof/tcp_server.hpp"

#include "liveprof/error.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>

namespace liveprof {

namespace {

bool send_all(int fd, std::string_view data) {
    while (!data.empty()) {
        const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return false;
        data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

}  // namespace

/// Outbound side of a protocol connection. The executor only enqueues; a
/// dedicated writer thread does the blocking sends.
struct TcpServer::Connection {
    explicit Connection(int fd) : fd(fd), writer([this] { write_loop(); }) {}

    ~Connection() {
        {
            std::lock_guard lock(mutex);
            closed = true;
        }
        cv.notify_all();
        writer.join();
    }

    void push(std::string line) {
        {
            std::lock_guard lock(mutex);
            if (closed) return;
            outbox.push_back(std::move(line));
        }
        cv.notify_one();
    }

    void write_loop() {
        while (true) {
            std::string line;
            {
                std::unique_lock lock(mutex);
                cv.wait(lock, [&] { return closed || !outbox.empty(); });
                if (outbox.empty()) return;
                line = std::move(outbox.front());
                outbox.pop_front();
            }
            line.push_back('\n');
            if (!send_all(fd, line)) {
                std::lock_guard lock(mutex);
                outbox.clear();
            }
        }
    }

    int fd;
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<std::string> outbox;
    bool closed = false;
    std::thread writer;
};

TcpServer::TcpServer(ServerLoop& loop, std::string index_html) : loop_(loop), index_html_(std::move(index_html)) {}

TcpServer::~TcpServer() {
    stop();
    std::vector<std::thread> threads;
    {
        std::lock_guard lock(threads_mutex_);
        threads.swap(threads_);
    }
    for (auto& t : threads) t.join();
}

void TcpServer::listen(std::uint16_t port) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 || ::listen(listen_fd_, 16) < 0) {
        const std::string reason = std::strerror(errno);
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw IoError("cannot listen on port " + std::to_string(port) + ": " + reason);
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

void TcpServer::serve() {
    while (!stopping_) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR && !stopping_) continue;
            break;
        }
        std::lock_guard lock(threads_mutex_);
        if (stopping_) {
            ::close(fd);
            break;
        }
        open_fds_.insert(fd);
        threads_.emplace_back([this, fd] { handle_connection(fd); });
    }
}

void TcpServer::stop() {
    if (stopping_.exchange(true)) return;
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    std::lock_guard lock(threads_mutex_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
}

void TcpServer::handle_connection(int fd) {
    std::string buffer;
    char chunk[4096];
    std::shared_ptr<Connection> conn;
    ClientId client = 0;
    bool first_line = true;

    while (true) {
        std::size_t nl;
        while ((nl = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, nl);
            buffer.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (first_line) {
                first_line = false;
                if (line.starts_with("GET ") || line.starts_with("HEAD ")) {
                    serve_http(fd, line);
                    close_connection(fd);
                    return;
                }
                conn = std::make_shared<Connection>(fd);
                std::weak_ptr<Connection> weak = conn;
                client = loop_.connect([weak](const std::string& out) {
                    if (auto c = weak.lock()) c->push(out);
                });
            }
            if (!line.empty()) loop_.post(client, std::move(line));
        }
        const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
    }
    if (conn) {
        loop_.disconnect(client);
        loop_.wait_idle();
        conn.reset();
    }
    close_connection(fd);
}

void TcpServer::close_connection(int fd) {
    std::lock_guard lock(threads_mutex_);
    open_fds_.erase(fd);
    ::close(fd);
}

void TcpServer::serve_http(int fd, const std::string& request_line) {
    const auto sp1 = request_line.find(' ');
    const auto sp2 = request_line.find(' ', sp1 + 1);
    const std::string target = request_line.substr(sp1 + 1, sp2 == std::string::npos ? std::string::npos : sp2 - sp1 - 1);

    std::string status = "200 OK";
    std::string type = "text/html; charset=utf-8";
    std::string body;
    if (target == "/snapshot") {
        type = "application/json";
        loop_.run_sync([&](SyncServer& s) { body = dump_canonical(s.snapshot()); });
    } else if (target == "/" || target == "/index.html") {
        body = index_html_;
    } else {
        status = "404 Not Found";
        type = "text/plain";
        body = "not found\n";
    }
    std::string response = "HTTP/1.1 " + status + "\r\nContent-Type: " + type +
                           "\r\nContent-Length: " + std::to_string(body.size()) + "\r\nConnection: close\r\n\r\n";
    if (!request_line.starts_with("HEAD ")) response += body;
    send_all(fd, response);
}

}  // namespace liveprof
