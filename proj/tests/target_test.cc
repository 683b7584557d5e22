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


#include "matctl/target.h"

#include <gtest/gtest.h>

#include <atomic>
#include <thread>
#include <vector>

#include "matctl/builder.h"
#include "matctl/error.h"
#include "testing/fixtures.h"
#include "testing/generators.h"

namespace matctl {
namespace {

using testing::Rng;

class TargetTest : public ::testing::Test {
 protected:
  TableUpdate Insert(std::uint64_t src, std::uint64_t dst, const char* action = "permit") {
    return BuildInsert(table_, {{"src_ip", src}, {"dst_ip", dst}}, action);
  }

  ProgramSchema schema_ = testing::FirewallSchema();
  const TableSchema& table_ = schema_.tables[0];
  TargetState state_{schema_};
};

TEST_F(TargetTest, ThirtyThousandUniqueInserts) {
  WriteBatch batch;
  for (std::uint64_t i = 0; i < 30000; ++i) batch.updates.push_back(Insert(i, i * 7));
  const WriteReport r = state_.ApplyWrite(batch);
  EXPECT_EQ(r.overall, Overall::kOk);
  EXPECT_EQ(r.per_op.size(), 30000u);
  EXPECT_EQ(state_.Occupancy(table_.id), 30000u);
}

TEST_F(TargetTest, DuplicateInNonAtomicBatchIsPartial) {
  const WriteReport r = state_.ApplyWrite(WriteBatch{false, {Insert(1, 1), Insert(1, 1)}});
  EXPECT_EQ(r.overall, Overall::kPartial);
  ASSERT_EQ(r.per_op.size(), 2u);
  EXPECT_EQ(r.per_op[0].code, StatusCode::kOk);
  EXPECT_EQ(r.per_op[1].code, StatusCode::kAlreadyExists);
  EXPECT_EQ(state_.Occupancy(table_.id), 1u);
}

TEST_F(TargetTest, DuplicateInAtomicBatchFails) {
  const WriteReport r = state_.ApplyWrite(WriteBatch{true, {Insert(1, 1), Insert(1, 1)}});
  EXPECT_EQ(r.overall, Overall::kFailed);
  EXPECT_EQ(r.per_op[0].code, StatusCode::kOk);
  EXPECT_EQ(r.per_op[0].message, "rolled back");
  EXPECT_EQ(r.per_op[1].code, StatusCode::kAlreadyExists);
  EXPECT_EQ(state_.Occupancy(table_.id), 0u);
}

TEST_F(TargetTest, UnknownTableIsSchemaMismatch) {
  TableUpdate u = Insert(1, 1);
  u.table_id = 77;
  const WriteReport r = state_.ApplyWrite(WriteBatch{false, {u, Insert(2, 2)}});
  EXPECT_EQ(r.per_op[0].code, StatusCode::kSchemaMismatch);
  EXPECT_TRUE(r.per_op[1].ok());
  EXPECT_THROW(state_.ReadEntries(77, std::nullopt), Error);
}

TEST_F(TargetTest, ReadEntriesInInsertionOrderAndByKey) {
  for (std::uint64_t i = 10; i > 0; --i) state_.ApplyWrite(WriteBatch{false, {Insert(i, 0)}});
  const auto all = state_.ReadEntries(table_.id, std::nullopt);
  ASSERT_EQ(all.size(), 10u);
  EXPECT_EQ(all.front().key.fields[0].match.value, (Bytes{0, 0, 0, 10}));
  EXPECT_EQ(all.back().key.fields[0].match.value, (Bytes{0, 0, 0, 1}));
  const auto one = state_.ReadEntries(table_.id, BuildKey(table_, {{"src_ip", 4}, {"dst_ip", 0}}));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], Insert(4, 0));
  EXPECT_TRUE(state_.ReadEntries(table_.id, BuildKey(table_, {{"src_ip", 4}, {"dst_ip", 1}}))
                  .empty());
}

TEST_F(TargetTest, MissNotifiesEverySubscriberOnce) {
  std::vector<Notify> a;
  std::vector<Notify> b;
  const auto ida = state_.Subscribe([&](const Notify& n) { a.push_back(n); });
  state_.Subscribe([&](const Notify& n) { b.push_back(n); });
  state_.ApplyWrite(WriteBatch{false, {Insert(1, 2)}});

  // Fields given out of order come back in key order.
  const std::vector<FieldValue> packet = {{2, {0, 0, 0, 9}}, {1, {0, 0, 0, 8}}};
  EXPECT_FALSE(state_.HandleTestPacket(table_.id, packet).has_value());
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(a[0].fields[0].field_id, 1u);
  EXPECT_EQ(a[0].fields[1].value, (Bytes{0, 0, 0, 9}));
  EXPECT_EQ(a[0].reason, NotifyReason::kLookupMiss);

  EXPECT_TRUE(state_.HandleTestPacket(table_.id, BuildPacket(table_, {{"src_ip", 1}, {"dst_ip", 2}}))
                  .has_value());
  EXPECT_EQ(a.size(), 1u);

  state_.Unsubscribe(ida);
  EXPECT_EQ(state_.subscriber_count(), 1u);
  state_.HandleTestPacket(table_.id, packet);
  EXPECT_EQ(a.size(), 1u);
  EXPECT_EQ(b.size(), 2u);
}

TEST_F(TargetTest, MalformedTestPacketThrows) {
  EXPECT_THROW(state_.HandleTestPacket(table_.id, {{1, {0, 0, 0, 1}}}), Error);
  EXPECT_THROW(state_.HandleTestPacket(table_.id, {{1, {0, 0, 0, 1}}, {3, {0, 0, 0, 1}}}),
               Error);
}

// Non-atomic batches equal applying every update as its own batch; atomic
// batches that contain a failure leave the state untouched.
TEST(TargetBatchTest, SkipFailuresAndAtomicRollback) {
  Rng rng(5);
  const ProgramSchema schema = testing::RouterSchema();
  const TableSchema& acl = TableByName(schema, "acl");
  for (int iter = 0; iter < 40; ++iter) {
    std::vector<MatchKey> pool;
    for (int i = 0; i < 12; ++i) pool.push_back(testing::RandomKey(rng, acl));

    TargetState batched(schema);
    TargetState sequential(schema);
    TargetState atomic(schema);
    const auto seed = testing::RandomMixedOps(rng, acl, pool, 20);
    for (const auto& u : seed) {
      batched.ApplyWrite(WriteBatch{false, {u}});
      sequential.ApplyWrite(WriteBatch{false, {u}});
      atomic.ApplyWrite(WriteBatch{false, {u}});
    }

    const auto ops = testing::RandomMixedOps(rng, acl, pool, 40);
    const WriteReport r = batched.ApplyWrite(WriteBatch{false, ops});
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const WriteReport one = sequential.ApplyWrite(WriteBatch{false, {ops[i]}});
      ASSERT_EQ(one.per_op[0].code, r.per_op[i].code) << "op " << i;
    }
    ASSERT_EQ(batched.Snapshot(), sequential.Snapshot());

    const auto before = atomic.Snapshot();
    auto failing = ops;
    TableUpdate bad = failing.front();
    bad.table_id = 999;
    failing.insert(failing.begin() + static_cast<std::ptrdiff_t>(
                                         testing::Uniform(rng, 0, failing.size())),
                   bad);
    const WriteReport ra = atomic.ApplyWrite(WriteBatch{true, failing});
    ASSERT_EQ(ra.overall, Overall::kFailed);
    ASSERT_EQ(atomic.Snapshot(), before);
  }
}

TEST(TargetConcurrencyTest, ConcurrentWritersLinearize) {
  const ProgramSchema schema = testing::FirewallSchema();
  const TableSchema& t = schema.tables[0];
  TargetState state(schema);
  constexpr int kWriters = 4;
  constexpr int kKeys = 2000;
  std::vector<WriteReport> reports(kWriters);
  std::vector<std::thread> threads;
  for (int w = 0; w < kWriters; ++w) {
    threads.emplace_back([&, w] {
      WriteBatch batch;
      for (int k = 0; k < kKeys; ++k) {
        // Every writer tries every shared key, tagging it with its own dst.
        TableUpdate u = BuildInsert(t, {{"src_ip", static_cast<std::uint64_t>(k)}, {"dst_ip", 0}},
                                    w % 2 == 0 ? "permit" : "deny");
        batch.updates.push_back(std::move(u));
        if (batch.updates.size() == 100) {
          auto r = state.ApplyWrite(batch);
          reports[w].per_op.insert(reports[w].per_op.end(), r.per_op.begin(), r.per_op.end());
          batch.updates.clear();
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(state.Occupancy(t.id), static_cast<std::size_t>(kKeys));
  for (int k = 0; k < kKeys; ++k) {
    int winners = 0;
    for (int w = 0; w < kWriters; ++w) winners += reports[w].per_op[k].ok() ? 1 : 0;
    ASSERT_EQ(winners, 1) << "key " << k;
  }
}

}  // namespace
}  // namespace matctl
