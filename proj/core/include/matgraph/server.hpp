#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "matgraph/graph.hpp"

namespace matgraph {

struct ServerConfig {
    std::uint16_t port = 6380;
    unsigned workers = 4;
    std::optional<std::filesystem::path> snapshot_dir;
    std::size_t max_line = 1 << 20;
};

/// True for `[A-Za-z0-9_-]{1,64}`.
bool valid_graph_name(std::string_view name);

/// Named graphs plus their reader-writer guards. The map itself is guarded
/// by a plain mutex; each graph by a shared_mutex (shared for reads and
/// SAVE, exclusive for CREATE queries and LOAD).
class GraphRegistry {
public:
    GraphRegistry() = default;

    /// Restores every `<name>.snap` in the directory (when set and present).
    explicit GraphRegistry(std::optional<std::filesystem::path> snapshot_dir);

    struct Entry {
        std::shared_mutex guard;
        PropertyGraph graph;
    };

    /// Creates an empty graph on first reference. Throws Error on a name
    /// that fails valid_graph_name.
    Entry& get_or_create(std::string_view name);

    std::vector<std::string> names() const;

    /// Writes `<name>.snap` per graph into snapshot_dir; no-op without one.
    void save_all() const;

    const std::optional<std::filesystem::path>& snapshot_dir() const noexcept {
        return snapshot_dir_;
    }

private:
    mutable std::mutex map_mutex_;
    std::map<std::string, std::unique_ptr<Entry>, std::less<>> entries_;
    std::optional<std::filesystem::path> snapshot_dir_;
};

/// Execution hook: (query id, operator name), invoked on the thread running
/// the operator. Lets tests pin every operator of a query to one worker.
using QueryObserver = std::function<void(std::uint64_t query_id, std::string_view op)>;

/// Pure protocol semantics for one request line; no sockets involved.
/// Responses always end with LF. `shutdown` (when non-null) is set to true
/// by a SHUTDOWN request after all graphs were saved.
std::string handle_request(std::string_view line, GraphRegistry& registry,
                           std::uint64_t query_id = 0,
                           const QueryObserver& observer = {},
                           bool* shutdown = nullptr);

/// Dispatcher-plus-worker-pool TCP server. One thread accepts connections
/// and reads request lines; `workers` threads execute them, one whole query
/// per worker. Responses per connection keep request order.
class Server {
public:
    explicit Server(ServerConfig config);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Bind, listen and launch the threads. Throws Error when the port
    /// cannot be bound. Config port 0 picks an ephemeral port; see port().
    void start();

    /// Block until SHUTDOWN, stop(), or (under serve()) a signal, then join
    /// the threads and save all graphs.
    void wait();

    /// Request a graceful stop; safe from any thread, idempotent.
    void stop();

    std::uint16_t port() const noexcept { return bound_port_; }
    GraphRegistry& registry() noexcept { return registry_; }

    /// Set before start(); observes every query's operator executions.
    void set_query_observer(QueryObserver observer) { observer_ = std::move(observer); }

private:
    friend void serve(const ServerConfig&);

    struct Connection;
    struct Task {
        std::shared_ptr<Connection> conn;
        std::string line;
    };

    void dispatcher_loop();
    void worker_loop();
    void enqueue_line(const std::shared_ptr<Connection>& conn, std::string line);
    void finish_task(const std::shared_ptr<Connection>& conn);
    void push_task(Task task);
    bool pop_task(Task& task);
    void close_queue();
    void handle_readable(const std::shared_ptr<Connection>& conn);

    ServerConfig config_;
    GraphRegistry registry_;
    QueryObserver observer_;
    bool install_signal_handlers_ = false;

    int listen_fd_ = -1;
    int wake_read_fd_ = -1;
    int wake_write_fd_ = -1;
    std::uint16_t bound_port_ = 0;
    std::atomic<bool> stop_requested_{false};
    std::atomic<std::uint64_t> next_query_id_{1};

    std::thread dispatcher_;
    std::vector<std::thread> workers_;
    std::map<int, std::shared_ptr<Connection>> connections_;

    std::mutex queue_mutex_;
    std::condition_variable queue_cv_;
    std::deque<Task> queue_;
    bool queue_closed_ = false;
};

/// Run a server in the foreground until SHUTDOWN or SIGINT/SIGTERM.
void serve(const ServerConfig& config);

/// Read request lines from `in`, write responses to `out`; identical
/// semantics to the wire path. Returns on SHUTDOWN or end of input.
void repl(std::istream& in, std::ostream& out);

/// Blocking client speaking the line protocol; used by tests and the
/// over-wire benchmark mode.
class LineClient {
public:
    LineClient(const std::string& host, std::uint16_t port);
    ~LineClient();

    LineClient(const LineClient&) = delete;
    LineClient& operator=(const LineClient&) = delete;

    /// Send one request line and read the complete response (framing-aware:
    /// single line for PONG/ERR, up to END for result blocks). Returns the
    /// exact response bytes.
    std::string request(std::string_view line);

    void send_line(std::string_view line);
    std::string read_response();

private:
    std::string read_line();

    int fd_ = -1;
    std::string buffer_;
};

}  // namespace matgraph
