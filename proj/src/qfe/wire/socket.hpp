// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Minimal POSIX TCP transport carrying newline-terminated lines.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace qfe {

struct ServiceAddress {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 binds an ephemeral port

  // "host:port" or "[v6]:port"; ConfigError otherwise.
  static ServiceAddress parse(std::string_view text);
  std::string str() const;
};

// Value of the environment variable if set, else the fallback.
ServiceAddress address_from_env(const char* var, const ServiceAddress& fallback);

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { close(); }
  Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void close();
  // Wakes any thread blocked on this socket without releasing the fd.
  void shutdown();

 private:
  int fd_ = -1;
};

inline constexpr std::size_t kMaxLineBytes = std::size_t{64} << 20;

class LineChannel {
 public:
  LineChannel() = default;
  explicit LineChannel(Socket s) : s_(std::move(s)) {}

  bool open() const { return s_.valid(); }
  int fd() const { return s_.fd(); }
  void close() { s_.close(); }
  void shutdown() { s_.shutdown(); }

  // Receive and send timeouts; 0 disables.
  void set_timeout(int ms);

  // Next line without its terminator; nullopt on orderly EOF.
  // ConnectionError on socket errors, timeouts or over-long lines.
  std::optional<std::string> read_line(std::size_t max = kMaxLineBytes);
  void write_line(std::string_view line);

 private:
  Socket s_;
  std::string buf_;
};

// ConnectionError if no connection is established within timeout_ms.
LineChannel connect_tcp(const ServiceAddress& addr, int timeout_ms);

class Listener {
 public:
  // ConnectionError if the address cannot be bound.
  explicit Listener(const ServiceAddress& addr);

  std::uint16_t port() const { return port_; }
  // A pending connection, or nullopt after timeout_ms or once closed.
  std::optional<Socket> accept(int timeout_ms);
  void close() { s_.shutdown(); }

 private:
  Socket s_;
  std::uint16_t port_ = 0;
};

}  // namespace qfe
