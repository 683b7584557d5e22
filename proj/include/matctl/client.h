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

#ifndef MATCTL_CLIENT_H_
#define MATCTL_CLIENT_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "matctl/error.h"
#include "matctl/net.h"
#include "matctl/schema.h"
#include "matctl/wire.h"

namespace matctl {

using Clock = std::chrono::steady_clock;

struct TimedReport {
  WriteReport report;
  Clock::time_point request_created_at;
  Clock::time_point response_received_at;

  Clock::duration elapsed() const {
    return response_received_at - request_created_at;
  }
};

using NotifyHandler = std::function<void(const Notify&)>;
using SubscriptionErrorHandler = std::function<void(const Error&)>;

class Session;

// Keeps a notification handler registered for as long as it lives. Must not
// outlive its Session.
class Subscription {
 public:
  Subscription() = default;
  ~Subscription() { Cancel(); }
  Subscription(Subscription&& other) noexcept;
  Subscription& operator=(Subscription&& other) noexcept;
  Subscription(const Subscription&) = delete;
  Subscription& operator=(const Subscription&) = delete;

  // A handler invocation already in flight may still complete.
  void Cancel();
  bool active() const { return session_ != nullptr; }

 private:
  friend class Session;
  Subscription(Session* session, std::uint64_t id) : session_(session), id_(id) {}

  Session* session_ = nullptr;
  std::uint64_t id_ = 0;
};

// Controller-side connection to a target.
//
// One request is outstanding at a time: calls from several threads
// serialize. A reader thread demultiplexes incoming frames, handing acks to
// the waiting caller and queueing Notify frames for a dispatcher thread that
// runs subscription handlers in arrival order, so handlers may themselves
// issue requests on the session.
class Session {
 public:
  // Exchanges Hello/HelloAck, fetches the schema document and checks its
  // digest against the HelloAck. Throws Error(kConnectFailed) when the target
  // is unreachable and Error(kSchemaMismatch) when the digest or the program
  // name disagrees.
  static std::unique_ptr<Session> Connect(
      std::string_view endpoint,
      std::optional<std::string> expected_program = std::nullopt,
      std::string client_name = "matctl");

  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const ProgramSchema& schema() const { return schema_; }
  // Throws Error(kSchemaMismatch) if the session schema lacks the table.
  const TableSchema& table(std::string_view name) const;

  // Sends batch as exactly one Write frame and blocks for its WriteAck.
  // request_created_at is taken before encoding starts.
  TimedReport Write(const WriteBatch& batch);

  // Splits updates into ceil(n / batch_size) consecutive batches and sends
  // them strictly one after another. Stops at the first transport failure.
  std::vector<TimedReport> InsertAll(std::span<const TableUpdate> updates,
                                     std::size_t batch_size, bool atomic = false);

  std::vector<TableUpdate> Read(std::string_view table,
                                const std::optional<MatchKey>& key = std::nullopt);

  // Looks the packet up on the target. Returns the matched entry; a miss
  // also makes the target notify every session.
  std::optional<TableUpdate> SendTestPacket(std::string_view table,
                                            std::vector<FieldValue> fields);

  Subscription Subscribe(NotifyHandler handler,
                         SubscriptionErrorHandler on_error = {});

  void Close();
  bool alive() const;
  std::uint32_t last_request_id() const;

 private:
  friend class Subscription;

  explicit Session(net::Socket socket);

  // Issues one request and returns its reply body. created, when non-null,
  // receives the timestamp taken before encoding.
  MessageBody Call(const MessageBody& body, Clock::time_point* created = nullptr);
  MessageBody CallFrame(const std::function<Bytes(std::uint32_t)>& encode,
                        Clock::time_point* created);
  TimedReport WriteRange(std::span<const TableUpdate> updates, bool atomic);
  void ReaderLoop();
  void DispatchLoop();
  void Fail(ErrorCode code, const std::string& reason);
  void Unsubscribe(std::uint64_t id);

  net::Socket socket_;
  ProgramSchema schema_;

  std::mutex call_mu_;
  std::atomic<std::uint32_t> next_request_id_{1};

  mutable std::mutex mu_;
  std::condition_variable reply_cv_;
  std::optional<Message> reply_;
  std::optional<Error> broken_;

  std::condition_variable notify_cv_;
  std::deque<Notify> notifications_;
  bool closing_ = false;
  bool error_reported_ = false;
  std::uint64_t next_subscription_ = 1;
  struct Handlers {
    NotifyHandler on_notify;
    SubscriptionErrorHandler on_error;
  };
  std::map<std::uint64_t, Handlers> handlers_;

  std::thread reader_;
  std::thread dispatcher_;
};

}  // namespace matctl

#endif  // MATCTL_CLIENT_H_
