// Copyright 2026 The matctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "matctl/net.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <memory>

#include "matctl/error.h"
#include "matctl/wire.h"

namespace matctl::net {

namespace {

std::string ErrnoText() { return std::strerror(errno); }

void SetNoDelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

struct AddrInfoDeleter {
  void operator()(addrinfo* ai) const { ::freeaddrinfo(ai); }
};
using AddrInfoPtr = std::unique_ptr<addrinfo, AddrInfoDeleter>;

AddrInfoPtr Resolve(const Endpoint& endpoint, bool passive, ErrorCode code) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* result = nullptr;
  const std::string port = std::to_string(endpoint.port);
  const int rc = ::getaddrinfo(endpoint.host.empty() ? nullptr : endpoint.host.c_str(),
                               port.c_str(), &hints, &result);
  if (rc != 0) {
    throw Error(code, "cannot resolve " + endpoint.ToString() + ": " +
                          ::gai_strerror(rc));
  }
  return AddrInfoPtr(result);
}

// Reads exactly out.size() bytes. Returns the number read before EOF.
std::size_t ReadFull(int fd, std::span<std::uint8_t> out) {
  std::size_t got = 0;
  while (got < out.size()) {
    const ssize_t n = ::recv(fd, out.data() + got, out.size() - got, 0);
    if (n == 0) return got;
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kTransportError, "recv failed: " + ErrnoText());
    }
    got += static_cast<std::size_t>(n);
  }
  return got;
}

}  // namespace

Endpoint ParseEndpoint(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon + 1 == text.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "endpoint '" + std::string(text) + "' is not host:port");
  }
  Endpoint ep;
  ep.host = std::string(text.substr(0, colon));
  if (ep.host.size() >= 2 && ep.host.front() == '[' && ep.host.back() == ']') {
    ep.host = ep.host.substr(1, ep.host.size() - 2);
  }
  unsigned long port = 0;
  for (char c : text.substr(colon + 1)) {
    if (c < '0' || c > '9') {
      throw Error(ErrorCode::kInvalidArgument,
                  "bad port in endpoint '" + std::string(text) + "'");
    }
    port = port * 10 + static_cast<unsigned long>(c - '0');
    if (port > 65535) {
      throw Error(ErrorCode::kInvalidArgument,
                  "port out of range in '" + std::string(text) + "'");
    }
  }
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

void Socket::Close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::Shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

Socket Connect(const Endpoint& endpoint) {
  auto addrs = Resolve(endpoint, false, ErrorCode::kConnectFailed);
  std::string last_error = "no addresses";
  for (addrinfo* ai = addrs.get(); ai != nullptr; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
    if (!s.valid()) {
      last_error = ErrnoText();
      continue;
    }
    if (::connect(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0) {
      SetNoDelay(s.fd());
      return s;
    }
    last_error = ErrnoText();
  }
  throw Error(ErrorCode::kConnectFailed,
              "cannot connect to " + endpoint.ToString() + ": " + last_error);
}

Socket Listen(const Endpoint& endpoint) {
  auto addrs = Resolve(endpoint, true, ErrorCode::kTransportError);
  std::string last_error = "no addresses";
  for (addrinfo* ai = addrs.get(); ai != nullptr; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
    if (!s.valid()) {
      last_error = ErrnoText();
      continue;
    }
    int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0 &&
        ::listen(s.fd(), SOMAXCONN) == 0) {
      return s;
    }
    last_error = ErrnoText();
  }
  throw Error(ErrorCode::kTransportError,
              "cannot listen on " + endpoint.ToString() + ": " + last_error);
}

Socket Accept(const Socket& listener) {
  for (;;) {
    const int fd = ::accept4(listener.fd(), nullptr, nullptr, SOCK_CLOEXEC);
    if (fd >= 0) {
      SetNoDelay(fd);
      return Socket(fd);
    }
    if (errno == EINTR || errno == ECONNABORTED) continue;
    return Socket();
  }
}

std::uint16_t LocalPort(const Socket& socket) {
  sockaddr_storage addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(socket.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    throw Error(ErrorCode::kTransportError, "getsockname failed: " + ErrnoText());
  }
  if (addr.ss_family == AF_INET6) {
    return ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  }
  return ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
}

void SendAll(const Socket& socket, std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(socket.fd(), bytes.data() + sent,
                             bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kTransportError, "send failed: " + ErrnoText());
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::optional<Bytes> ReadFrame(const Socket& socket) {
  Bytes frame(kFrameHeaderSize);
  const std::size_t got = ReadFull(socket.fd(), frame);
  if (got == 0) return std::nullopt;
  if (got < kFrameHeaderSize) {
    throw Error(ErrorCode::kTransportError, "connection closed mid-header");
  }
  const FrameHeader header = DecodeHeader(frame);
  frame.resize(kFrameHeaderSize + header.payload_len);
  const std::span<std::uint8_t> payload(frame.data() + kFrameHeaderSize,
                                        header.payload_len);
  if (ReadFull(socket.fd(), payload) < header.payload_len) {
    throw Error(ErrorCode::kTransportError, "connection closed mid-frame");
  }
  return frame;
}

}  // namespace matctl::net
