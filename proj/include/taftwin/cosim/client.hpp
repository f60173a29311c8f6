#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "taftwin/cosim/message.hpp"
#include "taftwin/cosim/socket.hpp"

namespace taftwin::cosim {

struct Welcome {
  bool accepted = false;
  std::string client_id;
  std::vector<ParticipantId> owned_ids;
  std::vector<ParticipantId> rejected_ids;
  double dt = 0.0;
  std::string reason;
};

// Minimal blocking client speaking the same wire protocol as any external co-simulator.
class CosimClient {
 public:
  CosimClient() = default;
  CosimClient(const CosimClient&) = delete;
  CosimClient& operator=(const CosimClient&) = delete;

  void connect(const std::string& host, std::uint16_t port) {
    sock_ = connect_tcp(host, port);
    reader_.emplace(sock_);
  }

  Welcome hello(const HelloRequest& req, int timeout_ms = 5000) {
    send(make_hello(req));
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    for (;;) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      auto m = receive(static_cast<int>(std::max<long long>(left.count(), 0)));
      if (!m) throw SocketError("no WELCOME within timeout");
      if (m->kind != MessageKind::welcome) continue;
      Welcome w;
      w.accepted = get_field_or<bool>(m->control, "accepted", false);
      w.client_id = m->client_id.value_or("");
      w.owned_ids = get_field_or<std::vector<ParticipantId>>(m->control, "owned_ids", {});
      w.rejected_ids = get_field_or<std::vector<ParticipantId>>(m->control, "rejected_ids", {});
      w.dt = get_field_or<double>(m->control, "dt", 0.0);
      w.reason = get_field_or<std::string>(m->control, "reason", "");
      client_id_ = w.client_id;
      return w;
    }
  }

  // Next FRAME, skipping other kinds; nullopt on timeout. Throws SocketError when the master
  // closes the session.
  std::optional<FrameMessage> next_frame(int timeout_ms) {
    for (;;) {
      auto m = receive(timeout_ms);
      if (!m) return std::nullopt;
      if (m->kind == MessageKind::bye) throw SocketError("master ended the session");
      if (m->kind == MessageKind::frame) return m;
    }
  }

  void update(std::uint64_t frame_no, const std::vector<ParticipantState>& states) {
    FrameMessage m;
    m.kind = MessageKind::update;
    m.frame_no = frame_no;
    m.client_id = client_id_;
    m.participants = states;
    send(m);
  }

  void ack(std::uint64_t frame_no) {
    FrameMessage m;
    m.kind = MessageKind::ack;
    m.frame_no = frame_no;
    m.client_id = client_id_;
    send(m);
  }

  void bye() {
    FrameMessage m;
    m.kind = MessageKind::bye;
    m.client_id = client_id_;
    send(m);
  }

  void send(const FrameMessage& m) { send_all(sock_, encode_message(m)); }
  void send_raw(std::string_view bytes) { send_all(sock_, bytes); }

  // Receive loop: for each FRAME the handler returns the states to push back.
  std::size_t step_loop(const std::function<std::vector<ParticipantState>(const FrameMessage&)>& handler,
                        std::size_t max_frames, int timeout_ms = 5000) {
    std::size_t n = 0;
    while (n < max_frames) {
      auto f = next_frame(timeout_ms);
      if (!f) break;
      update(f->frame_no, handler(*f));
      ++n;
    }
    return n;
  }

  const std::string& client_id() const { return client_id_; }
  void close() { sock_.close(); }

 private:
  std::optional<FrameMessage> receive(int timeout_ms) {
    std::string line;
    switch (reader_->read_line(line, timeout_ms)) {
      case LineReader::Status::timeout: return std::nullopt;
      case LineReader::Status::closed: throw SocketError("connection closed");
      case LineReader::Status::line: break;
    }
    return decode_message(line, ++line_no_);
  }

  Socket sock_;
  std::optional<LineReader> reader_;
  std::string client_id_;
  std::size_t line_no_ = 0;
};

}  // namespace taftwin::cosim
