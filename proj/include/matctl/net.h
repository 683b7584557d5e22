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

#ifndef MATCTL_NET_H_
#define MATCTL_NET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "matctl/bytes.h"

namespace matctl::net {

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  std::string ToString() const { return host + ":" + std::to_string(port); }
};

// "host:port". Throws Error(kInvalidArgument).
Endpoint ParseEndpoint(std::string_view text);

// Owning socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { Close(); }

  Socket(Socket&& other) noexcept : fd_(other.Release()) {}
  Socket& operator=(Socket&& other) noexcept {
    if (this != &other) {
      Close();
      fd_ = other.Release();
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int Release() {
    int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void Close();
  // Unblocks any thread waiting on this socket without releasing it.
  void Shutdown();

 private:
  int fd_ = -1;
};

// Throws Error(kConnectFailed).
Socket Connect(const Endpoint& endpoint);

// Binds and listens; port 0 picks an ephemeral port. Throws
// Error(kTransportError) on bind failure.
Socket Listen(const Endpoint& endpoint);

// Blocks for the next connection. Returns an invalid Socket once the
// listener has been shut down.
Socket Accept(const Socket& listener);

std::uint16_t LocalPort(const Socket& socket);

// Throws Error(kTransportError) when the peer goes away.
void SendAll(const Socket& socket, std::span<const std::uint8_t> bytes);

// Reads one whole frame (header + payload). Returns nullopt on orderly EOF
// before the first header byte. Throws Error(kMalformed) for a bad header and
// Error(kTransportError) for I/O failures or EOF mid-frame.
std::optional<Bytes> ReadFrame(const Socket& socket);

}  // namespace matctl::net

#endif  // MATCTL_NET_H_
