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

#include "matctl/server.h"

#include <optional>
#include <utility>
#include <variant>

#include "matctl/error.h"

namespace matctl {

struct TargetServer::Session {
  net::Socket socket;
  std::mutex send_mu;
  std::thread thread;
  std::atomic<bool> done{false};
  std::optional<std::uint64_t> subscription;

  void Send(std::span<const std::uint8_t> frame) {
    std::lock_guard lock(send_mu);
    net::SendAll(socket, frame);
  }
};

namespace {

constexpr std::size_t kMaxStatusMessage = 1024;

StatusCode ToStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchemaMismatch: return StatusCode::kSchemaMismatch;
    case ErrorCode::kInvalidKey: return StatusCode::kInvalidKey;
    case ErrorCode::kInvalidAction: return StatusCode::kInvalidAction;
    default: return StatusCode::kMalformed;
  }
}

WriteAck ErrorAck(const Error& e) {
  std::string message = e.what();
  if (message.size() > kMaxStatusMessage) message.resize(kMaxStatusMessage);
  return WriteAck{MakeReport(true, {OpStatus{ToStatus(e.code()), message}})};
}

void ClipMessages(WriteReport& report) {
  for (auto& s : report.per_op) {
    if (s.message.size() > kMaxStatusMessage) s.message.resize(kMaxStatusMessage);
  }
}

}  // namespace

TargetServer::TargetServer(std::shared_ptr<TargetState> state,
                           const std::string& listen)
    : state_(std::move(state)), bound_(net::ParseEndpoint(listen)) {
  listener_ = net::Listen(bound_);
  port_ = net::LocalPort(listener_);
  notify_thread_ = std::thread([this] { NotifyLoop(); });
}

TargetServer::~TargetServer() { Shutdown(); }

std::string TargetServer::endpoint() const {
  std::string host = bound_.host.empty() || bound_.host == "0.0.0.0"
                         ? std::string("127.0.0.1")
                         : bound_.host;
  return host + ":" + std::to_string(port_);
}

void TargetServer::Start() {
  accept_thread_ = std::thread([this] { AcceptLoop(); });
}

void TargetServer::Serve() { AcceptLoop(); }

void TargetServer::AcceptLoop() {
  while (!stopping_) {
    net::Socket client = net::Accept(listener_);
    if (!client.valid()) break;
    if (stopping_) break;
    Reap();
    auto session = std::make_shared<Session>();
    session->socket = std::move(client);
    std::lock_guard lock(sessions_mu_);
    if (stopping_) break;
    sessions_.push_back(session);
    session->thread = std::thread([this, session] { RunSession(session); });
  }
}

void TargetServer::Reap() {
  std::lock_guard lock(sessions_mu_);
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if ((*it)->done) {
      if ((*it)->thread.joinable()) (*it)->thread.join();
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

std::size_t TargetServer::active_sessions() const {
  std::lock_guard lock(sessions_mu_);
  std::size_t n = 0;
  for (const auto& s : sessions_) n += s->done ? 0 : 1;
  return n;
}

void TargetServer::RunSession(const std::shared_ptr<Session>& session) {
  const std::weak_ptr<Session> weak = session;
  for (;;) {
    Message request;
    try {
      auto frame = net::ReadFrame(session->socket);
      if (!frame.has_value()) break;
      request = Decode(*frame);
    } catch (const Error&) {
      break;
    }

    std::optional<MessageBody> reply;
    if (std::holds_alternative<Hello>(request.body)) {
      if (!session->subscription.has_value()) {
        session->subscription = state_->Subscribe([this, weak](const Notify& n) {
          Bytes frame = Encode(Message{0, n});
          {
            std::lock_guard lock(outbound_mu_);
            outbound_.push_back(Outbound{weak, std::move(frame)});
          }
          outbound_cv_.notify_one();
        });
      }
      reply = HelloAck{state_->schema().schema_digest, state_->schema().program_name};
    } else if (std::holds_alternative<GetSchema>(request.body)) {
      reply = SchemaDoc{state_->schema_document()};
    } else if (auto* write = std::get_if<WriteRequest>(&request.body)) {
      WriteReport report = state_->ApplyWrite(std::move(write->batch));
      ClipMessages(report);
      reply = WriteAck{std::move(report)};
    } else if (auto* read = std::get_if<ReadRequest>(&request.body)) {
      try {
        reply = ReadAck{state_->ReadEntries(read->table_id, read->key)};
      } catch (const Error& e) {
        reply = ErrorAck(e);
      }
    } else if (auto* packet = std::get_if<TestPacket>(&request.body)) {
      try {
        ReadAck ack;
        if (auto hit = state_->HandleTestPacket(packet->table_id, packet->fields)) {
          ack.entries.push_back(hit->ToUpdate(packet->table_id));
        }
        reply = std::move(ack);
      } catch (const Error& e) {
        reply = ErrorAck(e);
      }
    } else {
      break;  // acks and Notify are never valid requests
    }

    if (state_->response_delay().count() > 0) {
      std::this_thread::sleep_for(state_->response_delay());
    }
    try {
      session->Send(Encode(Message{request.request_id, std::move(*reply)}));
    } catch (const Error&) {
      break;
    }
  }
  if (session->subscription.has_value()) state_->Unsubscribe(*session->subscription);
  session->socket.Shutdown();
  session->done = true;
}

void TargetServer::NotifyLoop() {
  for (;;) {
    Outbound next;
    {
      std::unique_lock lock(outbound_mu_);
      outbound_cv_.wait(lock, [this] { return outbound_stop_ || !outbound_.empty(); });
      if (outbound_.empty()) return;
      next = std::move(outbound_.front());
      outbound_.pop_front();
    }
    auto session = next.session.lock();
    if (session == nullptr || session->done) continue;
    try {
      session->Send(next.frame);
    } catch (const Error&) {
      session->socket.Shutdown();
    }
  }
}

void TargetServer::Shutdown() {
  if (stopping_.exchange(true)) return;
  listener_.Shutdown();
  if (accept_thread_.joinable()) accept_thread_.join();

  std::list<std::shared_ptr<Session>> sessions;
  {
    std::lock_guard lock(sessions_mu_);
    sessions.swap(sessions_);
  }
  for (auto& s : sessions) s->socket.Shutdown();
  for (auto& s : sessions) {
    if (s->thread.joinable()) s->thread.join();
  }

  {
    std::lock_guard lock(outbound_mu_);
    outbound_stop_ = true;
  }
  outbound_cv_.notify_one();
  if (notify_thread_.joinable()) notify_thread_.join();
  listener_.Close();
}

}  // namespace matctl
