#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "taftwin/cosim/barrier.hpp"
#include "taftwin/cosim/kernel.hpp"
#include "taftwin/cosim/socket.hpp"

namespace taftwin::cosim {

struct ServerConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  double dt = 0.05;
  int timeout_ms = 200;    // barrier timeout per frame
  bool realtime = false;   // pace frames at dt of wall-clock time
};

struct ServerStats {
  std::size_t frames = 0;
  std::size_t malformed_lines = 0;
  std::map<std::string, std::size_t> lagging_frames;  // client id -> frames it missed
};

// Lockstep co-simulation master over TCP. One reader thread per connection validates and
// queues messages; `run` is the single tick task that owns the kernel.
class CosimServer {
 public:
  using FrameCallback = std::function<void(const Frame&, const TickReport&)>;

  CosimServer(Model& model, ServerConfig cfg) : cfg_(std::move(cfg)), kernel_(model, cfg_.dt) {}
  CosimServer(const CosimServer&) = delete;
  CosimServer& operator=(const CosimServer&) = delete;
  ~CosimServer() { stop(); }

  std::uint16_t start() {
    listener_ = listen_tcp(cfg_.host, cfg_.port);
    port_ = local_port(listener_);
    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
    return port_;
  }

  std::uint16_t port() const { return port_; }

  // Blocks until `n` HELLO messages have been queued in total, or the timeout passes.
  bool wait_for_hellos(std::size_t n, std::chrono::milliseconds timeout) {
    std::unique_lock lock(queue_mu_);
    return queue_cv_.wait_for(lock, timeout, [&] { return hellos_ >= n; });
  }

  // Runs `frames` ticks. Each tick broadcasts the current FRAME, waits for lockstep clients
  // up to the timeout, then merges whatever arrived. `stop_flag` ends the loop early.
  void run(std::size_t frames, const FrameCallback& on_frame = {}, const std::atomic<bool>* stop_flag = nullptr) {
    using clock = std::chrono::steady_clock;
    auto next_deadline = clock::now();
    const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(cfg_.dt));
    for (std::size_t i = 0; i < frames && running_; ++i) {
      if (stop_flag && stop_flag->load()) break;
      const Frame& cur = kernel_.current();
      barrier_.begin(cur.frame_no, kernel_.expected_connections());
      const std::string wire = encode_message(to_message(cur));
      for (const auto& [cid, c] : kernel_.clients()) send_to(c.connection, wire);
      barrier_.wait(std::chrono::milliseconds(cfg_.timeout_ms));

      std::vector<InboundMessage> inbound;
      {
        std::lock_guard lock(queue_mu_);
        inbound.swap(queue_);
      }
      trace_.ticks.push_back(inbound);
      TickReport rep = kernel_.tick(inbound);
      for (const auto& out : rep.outbox) send_to(out.connection, encode_message(out.message));
      for (const auto& cid : rep.lagging) ++stats_.lagging_frames[cid];
      ++stats_.frames;
      if (on_frame) on_frame(kernel_.current(), rep);
      if (cfg_.realtime) {
        next_deadline += period;
        std::this_thread::sleep_until(next_deadline);
      }
    }
  }

  // Tells clients the session ends, then releases every thread and socket.
  void stop() {
    if (!running_.exchange(false)) return;
    FrameMessage bye;
    bye.kind = MessageKind::bye;
    bye.frame_no = kernel_.current().frame_no;
    bye.sim_time = kernel_.current().sim_time;
    for (const auto& [cid, c] : kernel_.clients()) send_to(c.connection, encode_message(bye));
    if (acceptor_.joinable()) acceptor_.join();
    std::vector<std::shared_ptr<Connection>> conns;
    {
      std::lock_guard lock(conn_mu_);
      for (auto& [name, c] : connections_) conns.push_back(c);
    }
    for (auto& c : conns) c->socket.shutdown();
    for (auto& c : conns) {
      if (c->reader.joinable()) c->reader.join();
    }
    listener_.close();
  }

  const Kernel& kernel() const { return kernel_; }
  const UpdateTrace& trace() const { return trace_; }
  const ServerStats& stats() const { return stats_; }
  std::size_t malformed_lines() const { return malformed_.load(); }

 private:
  struct Connection {
    std::string name;
    Socket socket;
    std::thread reader;
    std::atomic<bool> alive{true};
  };

  void accept_loop() {
    std::size_t seq = 0;
    while (running_) {
      std::optional<Socket> s;
      try {
        s = accept_tcp(listener_, 50);
      } catch (const SocketError&) {
        continue;
      }
      if (!s) continue;
      set_send_timeout(*s, std::max(cfg_.timeout_ms, 50));
      auto c = std::make_shared<Connection>();
      c->name = "conn-" + std::to_string(++seq);
      c->socket = std::move(*s);
      {
        std::lock_guard lock(conn_mu_);
        connections_[c->name] = c;
      }
      c->reader = std::thread([this, c] { read_loop(*c); });
    }
  }

  void read_loop(Connection& c) {
    LineReader reader(c.socket);
    std::string line;
    std::size_t line_no = 0;
    bool said_bye = false;
    while (running_ && c.alive) {
      LineReader::Status st;
      try {
        st = reader.read_line(line, 50);
      } catch (const SocketError&) {
        break;
      }
      if (st == LineReader::Status::timeout) continue;
      if (st == LineReader::Status::closed) break;
      ++line_no;
      FrameMessage m;
      try {
        m = decode_message(line, line_no);
      } catch (const MalformedMessage&) {
        ++malformed_;
        break;  // a peer that breaks framing is disconnected
      }
      if (m.kind == MessageKind::frame || m.kind == MessageKind::welcome) continue;  // master-only kinds
      enqueue({c.name, m});
      if (m.kind == MessageKind::update || m.kind == MessageKind::ack) barrier_.respond(c.name, m.frame_no);
      if (m.kind == MessageKind::bye) {
        said_bye = true;
        break;
      }
    }
    c.alive = false;
    barrier_.withdraw(c.name);
    if (!said_bye && running_) {
      FrameMessage bye;
      bye.kind = MessageKind::bye;
      enqueue({c.name, bye});
    }
  }

  void enqueue(InboundMessage in) {
    {
      std::lock_guard lock(queue_mu_);
      if (in.message.kind == MessageKind::hello) ++hellos_;
      queue_.push_back(std::move(in));
    }
    queue_cv_.notify_all();
  }

  void send_to(const std::string& connection, const std::string& wire) {
    std::shared_ptr<Connection> c;
    {
      std::lock_guard lock(conn_mu_);
      auto it = connections_.find(connection);
      if (it == connections_.end()) return;
      c = it->second;
    }
    if (!c->alive) return;
    try {
      send_all(c->socket, wire);
    } catch (const SocketError&) {
      c->alive = false;  // its reader notices and queues the BYE
      c->socket.shutdown();
    }
  }

  ServerConfig cfg_;
  Kernel kernel_;
  FrameBarrier barrier_;
  Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex conn_mu_;
  std::map<std::string, std::shared_ptr<Connection>> connections_;
  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::vector<InboundMessage> queue_;
  std::size_t hellos_ = 0;
  std::atomic<std::size_t> malformed_{0};
  UpdateTrace trace_;
  ServerStats stats_;
};

}  // namespace taftwin::cosim
