#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <utility>

#include "taftwin/core/error.hpp"

namespace taftwin::cosim {

class SocketError : public Error {
 public:
  using Error::Error;
};

inline SocketError socket_error(const std::string& what) {
  return SocketError(what + ": " + std::strerror(errno));
}

// Owning file descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      close();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }
  // Wakes any thread blocked on this socket without releasing the descriptor.
  void shutdown() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  int fd_ = -1;
};

inline sockaddr_in make_address(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) throw SocketError("bad IPv4 address '" + host + "'");
  return addr;
}

// Listens on host:port; port 0 picks a free port, reported by `local_port`.
inline Socket listen_tcp(const std::string& host, std::uint16_t port, int backlog = 16) {
  Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!s.valid()) throw socket_error("socket");
  int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const sockaddr_in addr = make_address(host, port);
  if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) throw socket_error("bind");
  if (::listen(s.fd(), backlog) != 0) throw socket_error("listen");
  return s;
}

inline std::uint16_t local_port(const Socket& s) {
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  if (::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) throw socket_error("getsockname");
  return ntohs(addr.sin_port);
}

inline void set_nodelay(const Socket& s) {
  int one = 1;
  ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

// Sends fail instead of blocking forever on a peer that stopped reading.
inline void set_send_timeout(const Socket& s, int timeout_ms) {
  timeval tv{timeout_ms / 1000, (timeout_ms % 1000) * 1000};
  ::setsockopt(s.fd(), SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

// Returns nullopt when nothing arrives within timeout_ms.
inline std::optional<Socket> accept_tcp(const Socket& listener, int timeout_ms) {
  pollfd p{listener.fd(), POLLIN, 0};
  const int r = ::poll(&p, 1, timeout_ms);
  if (r < 0 && errno != EINTR) throw socket_error("poll");
  if (r <= 0) return std::nullopt;
  Socket c(::accept4(listener.fd(), nullptr, nullptr, SOCK_CLOEXEC));
  if (!c.valid()) {
    if (errno == EAGAIN || errno == EINTR || errno == ECONNABORTED) return std::nullopt;
    throw socket_error("accept");
  }
  set_nodelay(c);
  return c;
}

inline Socket connect_tcp(const std::string& host, std::uint16_t port) {
  Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!s.valid()) throw socket_error("socket");
  const sockaddr_in addr = make_address(host, port);
  if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) throw socket_error("connect");
  set_nodelay(s);
  return s;
}

inline void send_all(const Socket& s, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(s.fd(), data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw socket_error("send");
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

// Buffered newline framing over a socket.
class LineReader {
 public:
  enum class Status { line, timeout, closed };

  explicit LineReader(const Socket& s, std::size_t max_line = 16u << 20) : sock_(&s), max_line_(max_line) {}

  // timeout_ms < 0 waits indefinitely. The returned line excludes its newline.
  Status read_line(std::string& out, int timeout_ms) {
    for (;;) {
      if (auto nl = buf_.find('\n'); nl != std::string::npos) {
        out.assign(buf_, 0, nl);
        buf_.erase(0, nl + 1);
        return Status::line;
      }
      if (buf_.size() > max_line_) throw SocketError("line exceeds " + std::to_string(max_line_) + " bytes");
      pollfd p{sock_->fd(), POLLIN, 0};
      const int r = ::poll(&p, 1, timeout_ms);
      if (r < 0) {
        if (errno == EINTR) continue;
        throw socket_error("poll");
      }
      if (r == 0) return Status::timeout;
      char chunk[65536];
      const ssize_t n = ::recv(sock_->fd(), chunk, sizeof chunk, 0);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        return Status::closed;
      }
      if (n == 0) return Status::closed;
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  const Socket* sock_;
  std::size_t max_line_;
  std::string buf_;
};

}  // namespace taftwin::cosim
