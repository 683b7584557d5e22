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

#ifndef MATCTL_SERVER_H_
#define MATCTL_SERVER_H_

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "matctl/net.h"
#include "matctl/target.h"

namespace matctl {

// Serves a TargetState over TCP, one thread per session.
//
// Per session: Hello -> HelloAck, GetSchema -> SchemaDoc, Write -> WriteAck,
// Read -> ReadAck, TestPacket -> ReadAck holding the matched entry (empty on
// a miss). Read and TestPacket failures are answered with a single-status
// FAILED WriteAck. Every response is held back by the target's
// response_delay. A malformed or unexpected frame closes only that session.
//
// Sessions that completed Hello receive lookup-miss Notify frames. Fanout
// runs on a dedicated thread so it never delays acknowledgments.
class TargetServer {
 public:
  // Binds immediately; throws Error(kTransportError) if the endpoint is not
  // bindable.
  TargetServer(std::shared_ptr<TargetState> state, const std::string& listen);
  ~TargetServer();

  TargetServer(const TargetServer&) = delete;
  TargetServer& operator=(const TargetServer&) = delete;

  // Accepts sessions on a background thread.
  void Start();
  // Accepts sessions on the calling thread until Shutdown().
  void Serve();
  // Stops accepting, disconnects every session and joins all threads.
  void Shutdown();

  std::uint16_t port() const { return port_; }
  std::string endpoint() const;
  TargetState& state() { return *state_; }
  std::size_t active_sessions() const;

 private:
  struct Session;
  struct Outbound {
    std::weak_ptr<Session> session;
    Bytes frame;
  };

  void AcceptLoop();
  void RunSession(const std::shared_ptr<Session>& session);
  void NotifyLoop();
  void Reap();

  std::shared_ptr<TargetState> state_;
  net::Endpoint bound_;
  net::Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;

  mutable std::mutex sessions_mu_;
  std::list<std::shared_ptr<Session>> sessions_;

  std::mutex outbound_mu_;
  std::condition_variable outbound_cv_;
  std::deque<Outbound> outbound_;
  bool outbound_stop_ = false;
  std::thread notify_thread_;
};

}  // namespace matctl

#endif  // MATCTL_SERVER_H_
