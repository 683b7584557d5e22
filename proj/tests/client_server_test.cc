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


#include <gtest/gtest.h>

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

#include "matctl/bench.h"
#include "matctl/builder.h"
#include "matctl/client.h"
#include "matctl/error.h"
#include "matctl/net.h"
#include "matctl/server.h"
#include "testing/fixtures.h"
#include "testing/generators.h"

namespace matctl {
namespace {

using std::chrono::milliseconds;
using testing::LoopbackTarget;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kRunFailed;
}

class SessionTest : public ::testing::Test {
 protected:
  TableUpdate Insert(std::uint64_t src, std::uint64_t dst, const char* action = "permit") {
    return BuildInsert(table_, {{"src_ip", src}, {"dst_ip", dst}}, action);
  }

  ProgramSchema schema_ = testing::FirewallSchema();
  const TableSchema& table_ = schema_.tables[0];
  LoopbackTarget target_{schema_};
};

TEST_F(SessionTest, HandshakeFetchesSchema) {
  auto session = Session::Connect(target_.endpoint(), "firewall");
  EXPECT_EQ(session->schema(), schema_);
  EXPECT_EQ(session->table("firewall_entries"), table_);
  EXPECT_EQ(CodeOf([&] { session->table("nope"); }), ErrorCode::kSchemaMismatch);
  EXPECT_EQ(CodeOf([&] { Session::Connect(target_.endpoint(), "router"); }),
            ErrorCode::kSchemaMismatch);
}

TEST(SessionConnectTest, UnreachableTargetFails) {
  std::string endpoint;
  {
    // Bind and release a port so nothing listens on it.
    LoopbackTarget t(testing::FirewallSchema());
    endpoint = t.endpoint();
  }
  EXPECT_EQ(CodeOf([&] { Session::Connect(endpoint); }), ErrorCode::kConnectFailed);
  EXPECT_EQ(CodeOf([&] { Session::Connect("not-an-endpoint"); }), ErrorCode::kInvalidArgument);
}

TEST_F(SessionTest, WriteReadRoundTrip) {
  auto session = Session::Connect(target_.endpoint());
  const TimedReport r = session->Write(WriteBatch{false, {Insert(1, 2), Insert(1, 2)}});
  EXPECT_EQ(r.report.overall, Overall::kPartial);
  EXPECT_GT(r.elapsed().count(), 0);
  const auto entries = session->Read("firewall_entries");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0], Insert(1, 2));
  const auto one = session->Read("firewall_entries",
                                 BuildKey(table_, {{"src_ip", 1}, {"dst_ip", 2}}));
  EXPECT_EQ(one.size(), 1u);
}

TEST_F(SessionTest, RemoteReadErrorsAreTyped) {
  auto session = Session::Connect(target_.endpoint());
  MatchKey bad = BuildKey(table_, {{"src_ip", 1}, {"dst_ip", 2}});
  bad.fields.pop_back();
  EXPECT_EQ(CodeOf([&] { session->Read("firewall_entries", bad); }), ErrorCode::kInvalidKey);
  EXPECT_EQ(CodeOf([&] { session->SendTestPacket("firewall_entries", {}); }),
            ErrorCode::kInvalidKey);
  // The session survives remote errors.
  EXPECT_TRUE(session->Read("firewall_entries").empty());
}

TEST_F(SessionTest, InsertAllIsIndependentOfBatchSize) {
  testing::Rng rng(21);
  std::vector<TableUpdate> updates;
  for (std::uint64_t i = 0; i < 997; ++i) updates.push_back(Insert(rng() >> 32, i));
  updates.push_back(updates[5]);  // one duplicate to exercise PARTIAL

  auto session = Session::Connect(target_.endpoint());
  std::vector<TableUpdate> reference;
  for (std::size_t batch : {1, 7, 100, 998, 5000}) {
    auto reports = session->InsertAll(updates, batch);
    ASSERT_EQ(reports.size(), (updates.size() + batch - 1) / batch);
    const auto state = session->Read("firewall_entries");
    if (reference.empty()) {
      reference = state;
      ASSERT_EQ(reference.size(), 997u);
    } else {
      ASSERT_EQ(state, reference) << "batch " << batch;
    }
    bench::ClearTable(*session, table_);
  }
}

TEST_F(SessionTest, RequestIdsIncreaseAndTimesNest) {
  auto session = Session::Connect(target_.endpoint());
  std::uint32_t last = session->last_request_id();
  std::vector<TableUpdate> updates;
  for (std::uint64_t i = 0; i < 200; ++i) updates.push_back(Insert(i, i));
  const auto begin = Clock::now();
  const auto reports = session->InsertAll(updates, 10);
  const auto end = Clock::now();
  Clock::duration sum{};
  for (const auto& r : reports) {
    ASSERT_GE(r.request_created_at, begin);
    ASSERT_LE(r.response_received_at, end);
    sum += r.elapsed();
  }
  EXPECT_LE(sum, end - begin);
  for (int i = 0; i < 5; ++i) {
    session->Read("firewall_entries");
    const std::uint32_t id = session->last_request_id();
    EXPECT_GT(id, last);
    last = id;
  }
}

TEST(SessionDelayTest, ResponseTimeIsAtLeastTheDelay) {
  LoopbackTarget target(testing::FirewallSchema(), milliseconds(2));
  auto session = Session::Connect(target.endpoint());
  const TableSchema& t = session->schema().tables[0];
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto r = session->Write(
        WriteBatch{false, {BuildInsert(t, {{"src_ip", i}, {"dst_ip", 0}}, "permit")}});
    ASSERT_GE(r.elapsed(), milliseconds(2));
  }
  const auto start = Clock::now();
  session->Read(t.name);
  EXPECT_GE(Clock::now() - start, milliseconds(2));
}

TEST_F(SessionTest, GarbageClosesOnlyThatSession) {
  auto good = Session::Connect(target_.endpoint());
  net::Socket raw = net::Connect(net::ParseEndpoint(target_.endpoint()));
  const Bytes garbage = {0xDE, 0xAD, 0xBE, 0xEF, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  net::SendAll(raw, garbage);
  EXPECT_FALSE(net::ReadFrame(raw).has_value());
  EXPECT_EQ(good->Write(WriteBatch{false, {Insert(1, 1)}}).report.overall, Overall::kOk);
}

TEST_F(SessionTest, ConcurrentSessionsAndSharedSession) {
  constexpr int kThreads = 4;
  constexpr std::uint64_t kPerThread = 250;
  auto shared = Session::Connect(target_.endpoint());
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t) {
    threads.emplace_back([&, t] {
      std::unique_ptr<Session> own;
      Session* s = shared.get();
      if (t % 2 == 0) {
        own = Session::Connect(target_.endpoint());
        s = own.get();
      }
      for (std::uint64_t i = 0; i < kPerThread; ++i) {
        const auto r = s->Write(WriteBatch{false, {Insert(t, i)}});
        ASSERT_EQ(r.report.overall, Overall::kOk);
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(target_.state->Occupancy(table_.id), kThreads * kPerThread);
}

TEST_F(SessionTest, NoEventsNoCallbacks) {
  auto session = Session::Connect(target_.endpoint());
  std::atomic<int> calls{0};
  auto sub = session->Subscribe([&](const Notify&) { ++calls; });
  session->Write(WriteBatch{false, {Insert(1, 1)}});
  ASSERT_TRUE(session->SendTestPacket("firewall_entries",
                                      BuildPacket(table_, {{"src_ip", 1}, {"dst_ip", 1}}))
                  .has_value());
  std::this_thread::sleep_for(milliseconds(50));
  EXPECT_EQ(calls.load(), 0);
}

TEST_F(SessionTest, LearningFirewall) {
  auto controller = Session::Connect(target_.endpoint());
  auto prober = Session::Connect(target_.endpoint());
  std::mutex mu;
  std::condition_variable cv;
  int learned = 0;
  auto sub = controller->Subscribe([&](const Notify& n) {
    controller->Write(WriteBatch{
        false,
        {BuildInsert(table_,
                     {{"src_ip", Value::FromBytes(n.fields[0].value)},
                      {"dst_ip", Value::FromBytes(n.fields[1].value)}},
                     "permit")}});
    std::lock_guard lock(mu);
    ++learned;
    cv.notify_all();
  });

  const auto packet = BuildPacket(table_, {{"src_ip", Value::Ipv4("10.0.0.1")},
                                           {"dst_ip", Value::Ipv4("10.0.0.2")}});
  EXPECT_FALSE(prober->SendTestPacket("firewall_entries", packet).has_value());
  {
    std::unique_lock lock(mu);
    ASSERT_TRUE(cv.wait_for(lock, std::chrono::seconds(5), [&] { return learned == 1; }));
  }
  const auto hit = prober->SendTestPacket("firewall_entries", packet);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->action_id, table_.FindAction("permit")->id);
  EXPECT_EQ(controller->Read("firewall_entries").size(), 1u);
}

TEST_F(SessionTest, CancelledSubscriptionStopsDelivery) {
  auto session = Session::Connect(target_.endpoint());
  std::atomic<int> calls{0};
  auto sub = session->Subscribe([&](const Notify&) { ++calls; });
  sub.Cancel();
  EXPECT_FALSE(sub.active());
  session->SendTestPacket("firewall_entries", BuildPacket(table_, {{"src_ip", 5}, {"dst_ip", 5}}));
  std::this_thread::sleep_for(milliseconds(50));
  EXPECT_EQ(calls.load(), 0);
}

TEST(SessionShutdownTest, TargetLossIsReportedOnce) {
  auto target = std::make_unique<LoopbackTarget>(testing::FirewallSchema());
  auto session = Session::Connect(target->endpoint());
  std::mutex mu;
  std::condition_variable cv;
  std::vector<ErrorCode> errors;
  auto sub = session->Subscribe([](const Notify&) {},
                                [&](const Error& e) {
                                  std::lock_guard lock(mu);
                                  errors.push_back(e.code());
                                  cv.notify_all();
                                });
  target.reset();
  {
    std::unique_lock lock(mu);
    ASSERT_TRUE(cv.wait_for(lock, std::chrono::seconds(5), [&] { return !errors.empty(); }));
  }
  EXPECT_EQ(errors, std::vector<ErrorCode>{ErrorCode::kTransportError});
  EXPECT_FALSE(session->alive());
  EXPECT_EQ(CodeOf([&] { session->Read("firewall_entries"); }), ErrorCode::kTransportError);
}

TEST(ServerTest, BindFailureAndSessionCount) {
  LoopbackTarget target(testing::FirewallSchema());
  EXPECT_EQ(CodeOf([&] {
              TargetServer clash(target.state, target.endpoint());
            }),
            ErrorCode::kTransportError);
  {
    auto a = Session::Connect(target.endpoint());
    auto b = Session::Connect(target.endpoint());
    EXPECT_EQ(target.server->active_sessions(), 2u);
  }
  for (int i = 0; i < 100 && target.server->active_sessions() != 0; ++i) {
    std::this_thread::sleep_for(milliseconds(10));
  }
  EXPECT_EQ(target.server->active_sessions(), 0u);
}

}  // namespace
}  // namespace matctl
