#include "matgraph/server.hpp"

#include <arpa/inet.h>
#include <csignal>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>
#include <utility>

#include <fmt/format.h>

#include "matgraph/cypher.hpp"
#include "matgraph/error.hpp"
#include "matgraph/execute.hpp"
#include "matgraph/plan.hpp"
#include "matgraph/snapshot.hpp"

namespace matgraph {

namespace {

constexpr std::string_view kSnapshotSuffix = ".snap";

std::string sanitize(std::string_view message) {
    std::string out(message);
    std::replace(out.begin(), out.end(), '\n', ' ');
    std::replace(out.begin(), out.end(), '\r', ' ');
    return out;
}

std::string err_line(std::string_view message) {
    return fmt::format("ERR {}\n", sanitize(message));
}

std::string format_result(const ResultTable& table) {
    std::string out = fmt::format("OK {}\n", table.rows.size());
    out += to_string(table);  // empty for write queries: no header at all
    out += "END\n";
    return out;
}

/// Splits off the first space-separated word.
std::pair<std::string_view, std::string_view> split_word(std::string_view text) {
    const std::size_t space = text.find(' ');
    if (space == std::string_view::npos) return {text, {}};
    return {text.substr(0, space), text.substr(space + 1)};
}

std::string run_query(std::string_view graph_name, std::string_view cypher,
                      GraphRegistry& registry, std::uint64_t query_id,
                      const QueryObserver& observer) {
    if (!valid_graph_name(graph_name)) return err_line("invalid graph name");
    GraphRegistry::Entry& entry = registry.get_or_create(graph_name);
    try {
        const QueryAst ast = parse(cypher);
        ExecObserver exec_observer;
        if (observer) {
            exec_observer = [&](std::string_view op) { observer(query_id, op); };
        }
        ResultTable table;
        if (ast.is_write()) {
            std::unique_lock lock(entry.guard);
            table = execute(plan(ast, entry.graph), entry.graph, exec_observer);
        } else {
            std::shared_lock lock(entry.guard);
            table = execute(plan(ast, entry.graph), entry.graph, exec_observer);
        }
        return format_result(table);
    } catch (const Error& e) {
        return err_line(e.what());
    }
}

std::string run_save(std::string_view graph_name, std::string_view path,
                     GraphRegistry& registry) {
    if (!valid_graph_name(graph_name)) return err_line("invalid graph name");
    GraphRegistry::Entry& entry = registry.get_or_create(graph_name);
    try {
        std::shared_lock lock(entry.guard);
        snapshot_save(entry.graph, std::filesystem::path(std::string(path)));
        return "OK 0\nEND\n";
    } catch (const Error& e) {
        return err_line(e.what());
    }
}

std::string run_load(std::string_view graph_name, std::string_view path,
                     GraphRegistry& registry) {
    if (!valid_graph_name(graph_name)) return err_line("invalid graph name");
    GraphRegistry::Entry& entry = registry.get_or_create(graph_name);
    try {
        PropertyGraph loaded = snapshot_load(std::filesystem::path(std::string(path)));
        std::unique_lock lock(entry.guard);
        entry.graph = std::move(loaded);
        return "OK 0\nEND\n";
    } catch (const Error& e) {
        return err_line(e.what());
    }
}

}  // namespace

bool valid_graph_name(std::string_view name) {
    if (name.empty() || name.size() > 64) return false;
    for (char c : name) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

GraphRegistry::GraphRegistry(std::optional<std::filesystem::path> snapshot_dir)
    : snapshot_dir_(std::move(snapshot_dir)) {
    if (!snapshot_dir_ || !std::filesystem::is_directory(*snapshot_dir_)) return;
    for (const auto& dirent : std::filesystem::directory_iterator(*snapshot_dir_)) {
        const std::filesystem::path& path = dirent.path();
        if (path.extension() != kSnapshotSuffix) continue;
        const std::string name = path.stem().string();
        if (!valid_graph_name(name)) continue;
        auto entry = std::make_unique<Entry>();
        entry->graph = snapshot_load(path);
        entries_.emplace(name, std::move(entry));
    }
}

GraphRegistry::Entry& GraphRegistry::get_or_create(std::string_view name) {
    if (!valid_graph_name(name)) {
        throw Error(fmt::format("invalid graph name '{}'", sanitize(name)));
    }
    std::lock_guard lock(map_mutex_);
    auto it = entries_.find(name);
    if (it == entries_.end()) {
        it = entries_.emplace(std::string(name), std::make_unique<Entry>()).first;
    }
    return *it->second;
}

std::vector<std::string> GraphRegistry::names() const {
    std::lock_guard lock(map_mutex_);
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, entry] : entries_) out.push_back(name);
    return out;
}

void GraphRegistry::save_all() const {
    if (!snapshot_dir_) return;
    std::filesystem::create_directories(*snapshot_dir_);
    std::lock_guard lock(map_mutex_);
    for (const auto& [name, entry] : entries_) {
        std::shared_lock graph_lock(entry->guard);
        snapshot_save(entry->graph,
                      *snapshot_dir_ / (name + std::string(kSnapshotSuffix)));
    }
}

std::string handle_request(std::string_view line, GraphRegistry& registry,
                           std::uint64_t query_id, const QueryObserver& observer,
                           bool* shutdown) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto [command, rest] = split_word(line);
    if (command == "PING") {
        if (!rest.empty()) return err_line("malformed PING");
        return "PONG\n";
    }
    if (command == "QUERY") {
        const auto [graph_name, cypher] = split_word(rest);
        if (graph_name.empty() || cypher.empty()) return err_line("malformed QUERY");
        return run_query(graph_name, cypher, registry, query_id, observer);
    }
    if (command == "SAVE" || command == "LOAD") {
        const auto [graph_name, path] = split_word(rest);
        if (graph_name.empty() || path.empty()) {
            return err_line(fmt::format("malformed {}", command));
        }
        return command == "SAVE" ? run_save(graph_name, path, registry)
                                 : run_load(graph_name, path, registry);
    }
    if (command == "SHUTDOWN") {
        if (!rest.empty()) return err_line("malformed SHUTDOWN");
        try {
            registry.save_all();
        } catch (const Error& e) {
            return err_line(e.what());
        }
        if (shutdown) *shutdown = true;
        return "OK 0\nEND\n";
    }
    return err_line("unknown command");
}

// ---------------------------------------------------------------------------
// Socket plumbing.

namespace {

void set_nonblocking(int fd) {
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

/// Blocking full write against a (possibly nonblocking) socket.
bool send_all(int fd, std::string_view data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n > 0) {
            sent += static_cast<std::size_t>(n);
            continue;
        }
        if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
            pollfd pfd{fd, POLLOUT, 0};
            ::poll(&pfd, 1, 1000);
            continue;
        }
        if (n < 0 && errno == EINTR) continue;
        return false;
    }
    return true;
}

std::atomic<int> g_signal_wake_fd{-1};
std::atomic<bool> g_signal_seen{false};

void on_signal(int) {
    g_signal_seen.store(true);
    const int fd = g_signal_wake_fd.load();
    if (fd >= 0) {
        const char byte = 1;
        [[maybe_unused]] ssize_t n = ::write(fd, &byte, 1);
    }
}

}  // namespace

/// Per-connection state. `mutex` guards the queue fields; the dispatcher
/// owns `inbuf` and fd lifetime, workers only write responses to the fd.
struct Server::Connection {
    explicit Connection(int fd_in) : fd(fd_in) {}

    const int fd;
    std::string inbuf;           // dispatcher only
    std::mutex mutex;
    std::deque<std::string> pending;  // lines waiting for the worker pool
    bool busy = false;                // one line is with a worker
    bool closing = false;             // close once pending drains
    bool dead = false;                // fd closed; drop any late responses
};

Server::Server(ServerConfig config)
    : config_(config), registry_(config.snapshot_dir) {
    if (config_.workers < 1) throw Error("worker count must be >= 1");
}

Server::~Server() {
    stop();
    wait();
}

void Server::start() {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw Error(fmt::format("socket: {}", std::strerror(errno)));
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(config_.port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        const int saved = errno;
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw Error(fmt::format("cannot bind port {}: {}", config_.port,
                                std::strerror(saved)));
    }
    if (::listen(listen_fd_, 64) != 0) {
        const int saved = errno;
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw Error(fmt::format("listen: {}", std::strerror(saved)));
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    bound_port_ = ntohs(addr.sin_port);
    set_nonblocking(listen_fd_);

    int pipe_fds[2];
    if (::pipe(pipe_fds) != 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw Error(fmt::format("pipe: {}", std::strerror(errno)));
    }
    wake_read_fd_ = pipe_fds[0];
    wake_write_fd_ = pipe_fds[1];
    set_nonblocking(wake_read_fd_);

    if (install_signal_handlers_) {
        g_signal_seen.store(false);
        g_signal_wake_fd.store(wake_write_fd_);
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::signal(SIGPIPE, SIG_IGN);
    }

    for (unsigned i = 0; i < config_.workers; ++i) {
        workers_.emplace_back([this] { worker_loop(); });
    }
    dispatcher_ = std::thread([this] { dispatcher_loop(); });
}

void Server::stop() {
    if (stop_requested_.exchange(true)) return;
    if (wake_write_fd_ >= 0) {
        const char byte = 1;
        [[maybe_unused]] ssize_t n = ::write(wake_write_fd_, &byte, 1);
    }
}

void Server::wait() {
    if (dispatcher_.joinable()) dispatcher_.join();
    close_queue();
    for (std::thread& worker : workers_) {
        if (worker.joinable()) worker.join();
    }
    workers_.clear();
    for (auto& [fd, conn] : connections_) {
        std::lock_guard lock(conn->mutex);
        if (!conn->dead) {
            conn->dead = true;
            ::close(fd);
        }
    }
    connections_.clear();
    if (listen_fd_ >= 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    if (install_signal_handlers_) g_signal_wake_fd.store(-1);
    if (wake_read_fd_ >= 0) {
        ::close(wake_read_fd_);
        ::close(wake_write_fd_);
        wake_read_fd_ = wake_write_fd_ = -1;
    }
    registry_.save_all();
}

void Server::push_task(Task task) {
    {
        std::lock_guard lock(queue_mutex_);
        if (queue_closed_) return;
        queue_.push_back(std::move(task));
    }
    queue_cv_.notify_one();
}

bool Server::pop_task(Task& task) {
    std::unique_lock lock(queue_mutex_);
    queue_cv_.wait(lock, [this] { return queue_closed_ || !queue_.empty(); });
    if (queue_.empty()) return false;
    task = std::move(queue_.front());
    queue_.pop_front();
    return true;
}

void Server::close_queue() {
    {
        std::lock_guard lock(queue_mutex_);
        queue_closed_ = true;
    }
    queue_cv_.notify_all();
}

void Server::enqueue_line(const std::shared_ptr<Connection>& conn, std::string line) {
    bool launch = false;
    {
        std::lock_guard lock(conn->mutex);
        if (conn->busy) {
            conn->pending.push_back(std::move(line));
        } else {
            conn->busy = true;
            launch = true;
        }
    }
    if (launch) push_task(Task{conn, std::move(line)});
}

/// Called by a worker once its response is written: either launch the next
/// queued line of this connection or mark it idle.
void Server::finish_task(const std::shared_ptr<Connection>& conn) {
    std::string next;
    bool launch = false;
    {
        std::lock_guard lock(conn->mutex);
        if (!conn->pending.empty()) {
            next = std::move(conn->pending.front());
            conn->pending.pop_front();
            launch = true;  // busy stays set
        } else {
            conn->busy = false;
        }
    }
    if (launch) push_task(Task{conn, std::move(next)});
}

void Server::worker_loop() {
    Task task;
    while (pop_task(task)) {
        const std::uint64_t query_id = next_query_id_.fetch_add(1);
        bool shutdown = false;
        const std::string response =
            handle_request(task.line, registry_, query_id, observer_, &shutdown);
        {
            std::lock_guard lock(task.conn->mutex);
            if (!task.conn->dead) send_all(task.conn->fd, response);
        }
        if (shutdown) stop();
        finish_task(task.conn);
        task.conn.reset();
    }
}

void Server::handle_readable(const std::shared_ptr<Connection>& conn) {
    char chunk[4096];
    for (;;) {
        const ssize_t n = ::recv(conn->fd, chunk, sizeof(chunk), 0);
        if (n > 0) {
            conn->inbuf.append(chunk, static_cast<std::size_t>(n));
            continue;
        }
        if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) break;
        if (n < 0 && errno == EINTR) continue;
        conn->closing = true;  // EOF or hard error
        break;
    }
    std::size_t start = 0;
    bool oversize = false;
    for (;;) {
        const std::size_t nl = conn->inbuf.find('\n', start);
        if (nl == std::string::npos) break;
        if (nl - start > config_.max_line) {
            oversize = true;
            break;
        }
        enqueue_line(conn, conn->inbuf.substr(start, nl - start));
        start = nl + 1;
    }
    conn->inbuf.erase(0, start);
    if (oversize || conn->inbuf.size() > config_.max_line) {
        std::lock_guard lock(conn->mutex);
        send_all(conn->fd, "ERR line too long\n");
        conn->closing = true;
        conn->inbuf.clear();
    }
}

void Server::dispatcher_loop() {
    while (!stop_requested_.load()) {
        std::vector<pollfd> fds;
        fds.push_back({wake_read_fd_, POLLIN, 0});
        fds.push_back({listen_fd_, POLLIN, 0});
        std::vector<std::shared_ptr<Connection>> polled;
        for (auto& [fd, conn] : connections_) {
            fds.push_back({fd, POLLIN, 0});
            polled.push_back(conn);
        }
        const int ready = ::poll(fds.data(), fds.size(), 500);
        if (g_signal_seen.load() && install_signal_handlers_) stop();
        if (stop_requested_.load()) break;
        if (ready <= 0) continue;

        if (fds[0].revents & POLLIN) {
            char drain[64];
            while (::read(wake_read_fd_, drain, sizeof(drain)) > 0) {
            }
        }
        if (fds[1].revents & POLLIN) {
            for (;;) {
                const int client = ::accept(listen_fd_, nullptr, nullptr);
                if (client < 0) break;
                set_nonblocking(client);
                const int one = 1;
                ::setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
                connections_.emplace(client, std::make_shared<Connection>(client));
            }
        }
        for (std::size_t i = 0; i < polled.size(); ++i) {
            const auto& conn = polled[i];
            const short revents = fds[i + 2].revents;
            if (revents & (POLLIN | POLLHUP | POLLERR)) handle_readable(conn);
        }
        // Reap connections that hit EOF and have nothing in flight.
        for (auto it = connections_.begin(); it != connections_.end();) {
            const auto& conn = it->second;
            std::unique_lock lock(conn->mutex);
            if (conn->closing && !conn->busy && conn->pending.empty()) {
                conn->dead = true;
                ::close(conn->fd);
                lock.unlock();
                it = connections_.erase(it);
            } else {
                ++it;
            }
        }
    }
}

void serve(const ServerConfig& config) {
    Server server(config);
    server.install_signal_handlers_ = true;
    server.start();
    server.wait();
}

void repl(std::istream& in, std::ostream& out) {
    GraphRegistry registry;
    std::string line;
    while (std::getline(in, line)) {
        bool shutdown = false;
        out << handle_request(line, registry, 0, {}, &shutdown);
        out.flush();
        if (shutdown) break;
    }
}

// ---------------------------------------------------------------------------
// LineClient.

LineClient::LineClient(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    const std::string service = fmt::format("{}", port);
    const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &result);
    if (rc != 0) {
        throw Error(fmt::format("cannot resolve {}: {}", host, ::gai_strerror(rc)));
    }
    for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            fd_ = fd;
            break;
        }
        ::close(fd);
    }
    ::freeaddrinfo(result);
    if (fd_ < 0) throw Error(fmt::format("cannot connect to {}:{}", host, port));
    const int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

LineClient::~LineClient() {
    if (fd_ >= 0) ::close(fd_);
}

void LineClient::send_line(std::string_view line) {
    std::string framed(line);
    framed += '\n';
    if (!send_all(fd_, framed)) throw Error("connection lost while sending");
}

std::string LineClient::read_line() {
    for (;;) {
        const std::size_t nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
        if (n > 0) {
            buffer_.append(chunk, static_cast<std::size_t>(n));
            continue;
        }
        if (n < 0 && errno == EINTR) continue;
        throw Error("connection closed mid-response");
    }
}

std::string LineClient::read_response() {
    std::string first = read_line();
    std::string response = first + "\n";
    if (first.rfind("OK ", 0) == 0) {
        for (;;) {
            const std::string line = read_line();
            response += line + "\n";
            if (line == "END") break;
        }
    }
    return response;
}

std::string LineClient::request(std::string_view line) {
    send_line(line);
    return read_response();
}

}  // namespace matgraph
