// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/wire/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "qfe/common/error.hpp"

namespace qfe {
namespace {

std::string errno_text() { return std::strerror(errno); }

struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head) freeaddrinfo(head);
  }
};

void resolve(const ServiceAddress& a, bool passive, AddrInfo& out) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  std::string port = std::to_string(a.port);
  int rc = getaddrinfo(a.host.empty() ? nullptr : a.host.c_str(), port.c_str(), &hints, &out.head);
  if (rc != 0) throw ConnectionError("cannot resolve " + a.str() + ": " + gai_strerror(rc));
}

}  // namespace

ServiceAddress ServiceAddress::parse(std::string_view text) {
  ServiceAddress a;
  std::string_view host, port;
  if (!text.empty() && text.front() == '[') {
    auto close = text.find(']');
    if (close == std::string_view::npos || close + 1 >= text.size() || text[close + 1] != ':') {
      throw ConfigError("bad address '" + std::string(text) + "'");
    }
    host = text.substr(1, close - 1);
    port = text.substr(close + 2);
  } else {
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos) throw ConfigError("address '" + std::string(text) + "' lacks a port");
    host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  char* end = nullptr;
  std::string ps(port);
  long p = std::strtol(ps.c_str(), &end, 10);
  if (ps.empty() || *end != '\0' || p < 0 || p > 65535) throw ConfigError("bad port in '" + std::string(text) + "'");
  a.host = host.empty() ? "127.0.0.1" : std::string(host);
  a.port = static_cast<std::uint16_t>(p);
  return a;
}

std::string ServiceAddress::str() const {
  if (host.find(':') != std::string::npos) return "[" + host + "]:" + std::to_string(port);
  return host + ":" + std::to_string(port);
}

ServiceAddress address_from_env(const char* var, const ServiceAddress& fallback) {
  const char* v = std::getenv(var);
  if (!v || !*v) return fallback;
  return ServiceAddress::parse(v);
}

Socket& Socket::operator=(Socket&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = o.fd_;
    o.fd_ = -1;
  }
  return *this;
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void LineChannel::set_timeout(int ms) {
  timeval tv{};
  tv.tv_sec = ms / 1000;
  tv.tv_usec = (ms % 1000) * 1000;
  setsockopt(s_.fd(), SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  setsockopt(s_.fd(), SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

std::optional<std::string> LineChannel::read_line(std::size_t max) {
  if (!s_.valid()) throw ConnectionError("read on a closed connection");
  std::size_t scanned = 0;
  for (;;) {
    auto nl = buf_.find('\n', scanned);
    if (nl != std::string::npos) {
      std::string line = buf_.substr(0, nl);
      buf_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    scanned = buf_.size();
    if (buf_.size() > max) throw ConnectionError("line exceeds " + std::to_string(max) + " bytes");
    char chunk[65536];
    ssize_t n = ::recv(s_.fd(), chunk, sizeof chunk, 0);
    if (n == 0) {
      if (buf_.empty()) return std::nullopt;
      throw ConnectionError("connection closed mid-line");
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) throw ConnectionError("timed out waiting for a reply");
      throw ConnectionError("receive failed: " + errno_text());
    }
    buf_.append(chunk, static_cast<std::size_t>(n));
  }
}

void LineChannel::write_line(std::string_view line) {
  if (!s_.valid()) throw ConnectionError("write on a closed connection");
  std::string data(line);
  data.push_back('\n');
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(s_.fd(), data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ConnectionError("send failed: " + errno_text());
    }
    off += static_cast<std::size_t>(n);
  }
}

LineChannel connect_tcp(const ServiceAddress& addr, int timeout_ms) {
  AddrInfo ai;
  resolve(addr, false, ai);
  std::string last = "no usable address";
  for (addrinfo* p = ai.head; p; p = p->ai_next) {
    Socket s(::socket(p->ai_family, p->ai_socktype | SOCK_CLOEXEC, p->ai_protocol));
    if (!s.valid()) {
      last = errno_text();
      continue;
    }
    int flags = fcntl(s.fd(), F_GETFL, 0);
    fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(s.fd(), p->ai_addr, p->ai_addrlen);
    if (rc != 0 && errno != EINPROGRESS) {
      last = errno_text();
      continue;
    }
    if (rc != 0) {
      pollfd pfd{s.fd(), POLLOUT, 0};
      int pr = ::poll(&pfd, 1, timeout_ms);
      if (pr <= 0) {
        last = pr == 0 ? "connect timed out" : errno_text();
        continue;
      }
      int err = 0;
      socklen_t len = sizeof err;
      getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
      if (err != 0) {
        last = std::strerror(err);
        continue;
      }
    }
    fcntl(s.fd(), F_SETFL, flags);
    int one = 1;
    setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return LineChannel(std::move(s));
  }
  throw ConnectionError("cannot connect to " + addr.str() + ": " + last);
}

Listener::Listener(const ServiceAddress& addr) {
  AddrInfo ai;
  resolve(addr, true, ai);
  std::string last = "no usable address";
  for (addrinfo* p = ai.head; p; p = p->ai_next) {
    Socket s(::socket(p->ai_family, p->ai_socktype | SOCK_CLOEXEC, p->ai_protocol));
    if (!s.valid()) continue;
    int one = 1;
    setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(s.fd(), p->ai_addr, p->ai_addrlen) != 0 || ::listen(s.fd(), 64) != 0) {
      last = errno_text();
      continue;
    }
    sockaddr_storage ss{};
    socklen_t len = sizeof ss;
    getsockname(s.fd(), reinterpret_cast<sockaddr*>(&ss), &len);
    port_ = ntohs(ss.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&ss)->sin6_port
                                           : reinterpret_cast<sockaddr_in*>(&ss)->sin_port);
    s_ = std::move(s);
    return;
  }
  throw ConnectionError("cannot listen on " + addr.str() + ": " + last);
}

std::optional<Socket> Listener::accept(int timeout_ms) {
  pollfd pfd{s_.fd(), POLLIN, 0};
  int pr = ::poll(&pfd, 1, timeout_ms);
  if (pr <= 0 || !(pfd.revents & POLLIN)) return std::nullopt;
  int fd = ::accept4(s_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
  if (fd < 0) return std::nullopt;
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return Socket(fd);
}

}  // namespace qfe
