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

#include "matctl/client.h"

#include <algorithm>
#include <utility>
#include <variant>

namespace matctl {

Subscription::Subscription(Subscription&& other) noexcept
    : session_(std::exchange(other.session_, nullptr)), id_(other.id_) {}

Subscription& Subscription::operator=(Subscription&& other) noexcept {
  if (this != &other) {
    Cancel();
    session_ = std::exchange(other.session_, nullptr);
    id_ = other.id_;
  }
  return *this;
}

void Subscription::Cancel() {
  if (session_ != nullptr) {
    session_->Unsubscribe(id_);
    session_ = nullptr;
  }
}

namespace {

ErrorCode FromStatus(StatusCode code) {
  switch (code) {
    case StatusCode::kSchemaMismatch: return ErrorCode::kSchemaMismatch;
    case StatusCode::kInvalidKey: return ErrorCode::kInvalidKey;
    case StatusCode::kInvalidAction: return ErrorCode::kInvalidAction;
    default: return ErrorCode::kRemoteMalformed;
  }
}

[[noreturn]] void ThrowRemote(const WriteAck& ack) {
  if (ack.report.per_op.empty()) {
    throw Error(ErrorCode::kRemoteMalformed, "error reply without status");
  }
  const OpStatus& s = ack.report.per_op.front();
  throw Error(FromStatus(s.code), "target: " + s.message);
}

template <typename T>
T Expect(MessageBody&& body, std::string_view what) {
  if (auto* v = std::get_if<T>(&body)) return std::move(*v);
  throw Error(ErrorCode::kRemoteMalformed,
              "unexpected reply to " + std::string(what));
}

}  // namespace

Session::Session(net::Socket socket) : socket_(std::move(socket)) {
  reader_ = std::thread([this] { ReaderLoop(); });
  dispatcher_ = std::thread([this] { DispatchLoop(); });
}

Session::~Session() {
  Close();
  if (dispatcher_.joinable()) dispatcher_.detach();
}

std::unique_ptr<Session> Session::Connect(std::string_view endpoint,
                                          std::optional<std::string> expected_program,
                                          std::string client_name) {
  net::Socket socket = net::Connect(net::ParseEndpoint(endpoint));
  std::unique_ptr<Session> session(new Session(std::move(socket)));

  auto hello = Expect<HelloAck>(session->Call(Hello{std::move(client_name)}), "Hello");
  if (expected_program.has_value() && *expected_program != hello.program_name) {
    throw Error(ErrorCode::kSchemaMismatch,
                "target serves program '" + hello.program_name + "', expected '" +
                    *expected_program + "'");
  }
  auto doc = Expect<SchemaDoc>(session->Call(GetSchema{}), "GetSchema");
  try {
    session->schema_ = ParseSchema(doc.document);
  } catch (const Error& e) {
    throw Error(ErrorCode::kRemoteMalformed,
                std::string("target schema document rejected: ") + e.what());
  }
  if (session->schema_.schema_digest != hello.schema_digest) {
    throw Error(ErrorCode::kSchemaMismatch,
                "schema digest " + std::to_string(session->schema_.schema_digest) +
                    " does not match announced " +
                    std::to_string(hello.schema_digest));
  }
  if (session->schema_.program_name != hello.program_name) {
    throw Error(ErrorCode::kSchemaMismatch, "schema program name disagrees with HelloAck");
  }
  return session;
}

const TableSchema& Session::table(std::string_view name) const {
  const TableSchema* t = schema_.FindTable(name);
  if (t == nullptr) {
    throw Error(ErrorCode::kSchemaMismatch,
                "program '" + schema_.program_name + "' has no table '" +
                    std::string(name) + "'");
  }
  return *t;
}

MessageBody Session::Call(const MessageBody& body, Clock::time_point* created) {
  return CallFrame([&body](std::uint32_t id) { return Encode(id, body); }, created);
}

MessageBody Session::CallFrame(const std::function<Bytes(std::uint32_t)>& encode,
                               Clock::time_point* created) {
  std::lock_guard call_lock(call_mu_);
  {
    std::lock_guard lock(mu_);
    if (broken_.has_value()) throw *broken_;
  }
  const std::uint32_t id = next_request_id_++;
  const auto start = Clock::now();
  if (created != nullptr) *created = start;
  const Bytes frame = encode(id);
  try {
    net::SendAll(socket_, frame);
  } catch (const Error& e) {
    Fail(ErrorCode::kTransportError, e.what());
    throw Error(ErrorCode::kTransportError, e.what());
  }

  std::unique_lock lock(mu_);
  reply_cv_.wait(lock, [this] { return reply_.has_value() || broken_.has_value(); });
  if (!reply_.has_value()) throw *broken_;
  Message reply = std::move(*reply_);
  reply_.reset();
  if (reply.request_id != id) {
    lock.unlock();
    Fail(ErrorCode::kRemoteMalformed, "reply carries request_id " +
                                          std::to_string(reply.request_id) +
                                          ", expected " + std::to_string(id));
    throw Error(ErrorCode::kRemoteMalformed, "request_id mismatch");
  }
  return std::move(reply.body);
}

TimedReport Session::Write(const WriteBatch& batch) {
  return WriteRange(batch.updates, batch.atomic);
}

TimedReport Session::WriteRange(std::span<const TableUpdate> updates, bool atomic) {
  TimedReport timed;
  auto ack = Expect<WriteAck>(
      CallFrame([&](std::uint32_t id) { return EncodeWrite(id, atomic, updates); },
                &timed.request_created_at),
      "Write");
  timed.response_received_at = Clock::now();
  if (ack.report.per_op.size() != updates.size()) {
    throw Error(ErrorCode::kRemoteMalformed,
                "WriteAck holds " + std::to_string(ack.report.per_op.size()) +
                    " statuses for " + std::to_string(updates.size()) + " updates");
  }
  timed.report = std::move(ack.report);
  return timed;
}

std::vector<TimedReport> Session::InsertAll(std::span<const TableUpdate> updates,
                                            std::size_t batch_size, bool atomic) {
  if (batch_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "batch_size must be positive");
  }
  std::vector<TimedReport> reports;
  reports.reserve((updates.size() + batch_size - 1) / batch_size);
  for (std::size_t begin = 0; begin < updates.size(); begin += batch_size) {
    const std::size_t end = std::min(updates.size(), begin + batch_size);
    reports.push_back(WriteRange(updates.subspan(begin, end - begin), atomic));
  }
  return reports;
}

std::vector<TableUpdate> Session::Read(std::string_view table_name,
                                       const std::optional<MatchKey>& key) {
  const TableSchema& t = table(table_name);
  MessageBody reply = Call(ReadRequest{t.id, key});
  if (auto* err = std::get_if<WriteAck>(&reply)) ThrowRemote(*err);
  return Expect<ReadAck>(std::move(reply), "Read").entries;
}

std::optional<TableUpdate> Session::SendTestPacket(std::string_view table_name,
                                                   std::vector<FieldValue> fields) {
  const TableSchema& t = table(table_name);
  MessageBody reply = Call(TestPacket{t.id, std::move(fields)});
  if (auto* err = std::get_if<WriteAck>(&reply)) ThrowRemote(*err);
  auto ack = Expect<ReadAck>(std::move(reply), "TestPacket");
  if (ack.entries.size() > 1) {
    throw Error(ErrorCode::kRemoteMalformed, "test packet matched several entries");
  }
  if (ack.entries.empty()) return std::nullopt;
  return std::move(ack.entries.front());
}

Subscription Session::Subscribe(NotifyHandler handler,
                                SubscriptionErrorHandler on_error) {
  std::lock_guard lock(mu_);
  if (broken_.has_value()) throw *broken_;
  const std::uint64_t id = next_subscription_++;
  handlers_.emplace(id, Handlers{std::move(handler), std::move(on_error)});
  return Subscription(this, id);
}

void Session::Unsubscribe(std::uint64_t id) {
  std::lock_guard lock(mu_);
  handlers_.erase(id);
}

void Session::Fail(ErrorCode code, const std::string& reason) {
  {
    std::lock_guard lock(mu_);
    if (!broken_.has_value()) broken_.emplace(code, reason);
  }
  reply_cv_.notify_all();
  notify_cv_.notify_all();
}

void Session::ReaderLoop() {
  for (;;) {
    Message msg;
    try {
      auto frame = net::ReadFrame(socket_);
      if (!frame.has_value()) {
        Fail(ErrorCode::kTransportError, "target closed the connection");
        return;
      }
      msg = Decode(*frame);
    } catch (const Error& e) {
      Fail(e.code() == ErrorCode::kMalformed ? ErrorCode::kRemoteMalformed
                                             : ErrorCode::kTransportError,
           e.what());
      socket_.Shutdown();
      return;
    }
    if (auto* notify = std::get_if<Notify>(&msg.body)) {
      {
        std::lock_guard lock(mu_);
        notifications_.push_back(std::move(*notify));
      }
      notify_cv_.notify_all();
      continue;
    }
    {
      std::lock_guard lock(mu_);
      reply_ = std::move(msg);
    }
    reply_cv_.notify_all();
  }
}

void Session::DispatchLoop() {
  std::unique_lock lock(mu_);
  for (;;) {
    notify_cv_.wait(lock, [this] {
      return closing_ || !notifications_.empty() ||
             (broken_.has_value() && !error_reported_);
    });
    if (!notifications_.empty()) {
      Notify n = std::move(notifications_.front());
      notifications_.pop_front();
      std::vector<NotifyHandler> targets;
      for (const auto& [id, h] : handlers_) targets.push_back(h.on_notify);
      lock.unlock();
      for (const auto& handler : targets) {
        if (handler) handler(n);
      }
      lock.lock();
      continue;
    }
    if (broken_.has_value() && !error_reported_) {
      error_reported_ = true;
      const Error error = *broken_;
      std::vector<SubscriptionErrorHandler> targets;
      for (const auto& [id, h] : handlers_) targets.push_back(h.on_error);
      handlers_.clear();
      lock.unlock();
      for (const auto& handler : targets) {
        if (handler) handler(error);
      }
      lock.lock();
      continue;
    }
    if (closing_) return;
  }
}

void Session::Close() {
  {
    std::lock_guard lock(mu_);
    if (closing_) return;
    closing_ = true;
    error_reported_ = true;  // a deliberate close is not a subscription failure
  }
  Fail(ErrorCode::kTransportError, "session closed");
  socket_.Shutdown();
  if (reader_.joinable()) reader_.join();
  notify_cv_.notify_all();
  if (dispatcher_.joinable() && dispatcher_.get_id() != std::this_thread::get_id()) {
    dispatcher_.join();
  }
}

bool Session::alive() const {
  std::lock_guard lock(mu_);
  return !broken_.has_value();
}

std::uint32_t Session::last_request_id() const {
  return next_request_id_ - 1;
}

}  // namespace matctl
