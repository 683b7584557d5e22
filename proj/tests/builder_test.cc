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


#include "matctl/builder.h"

#include <gtest/gtest.h>

#include "matctl/error.h"
#include "testing/fixtures.h"
#include "testing/generators.h"

namespace matctl {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kRunFailed;
}

class BuilderTest : public ::testing::Test {
 protected:
  ProgramSchema firewall_ = testing::FirewallSchema();
  ProgramSchema router_ = testing::RouterSchema();
  const TableSchema& fw_ = firewall_.tables[0];
};

TEST_F(BuilderTest, DottedQuadBecomesBigEndianBytes) {
  const TableUpdate u = BuildInsert(
      fw_, {{"src_ip", Value::Ipv4("10.0.0.1")}, {"dst_ip", Value::Ipv4("192.168.1.254")}},
      "deny");
  EXPECT_EQ(u.op, UpdateOp::kInsert);
  EXPECT_EQ(u.table_id, fw_.id);
  EXPECT_EQ(u.key.fields[0].match, MatchValue::Exact({0x0A, 0x00, 0x00, 0x01}));
  EXPECT_EQ(u.key.fields[1].match, MatchValue::Exact({0xC0, 0xA8, 0x01, 0xFE}));
  EXPECT_EQ(u.action_id, 2u);
  EXPECT_EQ(BuildInsert(fw_, {{"src_ip", 0x0A000001}, {"dst_ip", 0xC0A801FE}}, "deny"), u);
}

TEST_F(BuilderTest, Errors) {
  EXPECT_EQ(CodeOf([&] { Value::Ipv4("10.0.0"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { BuildInsert(fw_, {{"src_ip", 1ull << 32}, {"dst_ip", 1}}, "permit"); }),
            ErrorCode::kValueOverflow);
  EXPECT_EQ(CodeOf([&] { BuildInsert(fw_, {{"src_ip", 1}}, "permit"); }), ErrorCode::kInvalidKey);
  EXPECT_EQ(CodeOf([&] { BuildInsert(fw_, {{"src_ip", 1}, {"dst_ip", 1}, {"x", 1}}, "permit"); }),
            ErrorCode::kInvalidKey);
  EXPECT_EQ(CodeOf([&] { BuildInsert(fw_, {{"src_ip", 1}, {"dst_ip", 1}}, "allow"); }),
            ErrorCode::kInvalidAction);
  EXPECT_EQ(CodeOf([&] {
              BuildInsert(fw_, {{"src_ip", 1}, {"dst_ip", 1}}, "permit", {{"port", 1}});
            }),
            ErrorCode::kInvalidAction);
  EXPECT_EQ(CodeOf([&] {
              BuildInsert(fw_, {{"src_ip", KeyInput::Lpm(1, 8)}, {"dst_ip", 1}}, "permit");
            }),
            ErrorCode::kInvalidKey);
  const TableSchema& lpm = TableByName(router_, "ipv4_lpm");
  EXPECT_EQ(CodeOf([&] { BuildInsert(lpm, {{"dst_addr", KeyInput::Lpm(1, 8)}}, "forward"); }),
            ErrorCode::kInvalidAction);
  EXPECT_EQ(CodeOf([&] {
              BuildInsert(lpm, {{"dst_addr", KeyInput::Lpm(1, 8)}}, "forward", {{"port", 512}});
            }),
            ErrorCode::kValueOverflow);
  EXPECT_EQ(CodeOf([&] { BuildInsert(lpm, {{"dst_addr", KeyInput::Lpm(1, 33)}}, "drop"); }),
            ErrorCode::kInvalidKey);
}

TEST_F(BuilderTest, LpmAndTernaryAreCanonical) {
  const TableSchema& lpm = TableByName(router_, "ipv4_lpm");
  const TableUpdate u = BuildInsert(
      lpm, {{"dst_addr", KeyInput::Lpm(Value::Ipv4("10.1.2.3"), 16)}}, "forward", {{"port", 7}});
  EXPECT_EQ(u.key.fields[0].match, MatchValue::Lpm({10, 1, 0, 0}, 16));
  EXPECT_EQ(u.params[0].value, (Bytes{0x00, 0x07}));

  const TableSchema& acl = TableByName(router_, "acl");
  const MatchKey k = BuildKey(
      acl, {{"src_addr", KeyInput::Ternary(0xFFFFFFFF, 0xFF00FF00)}, {"l4_port", KeyInput::Ternary(80, 0xFFFF)}},
      3);
  EXPECT_EQ(k.fields[0].match, MatchValue::Ternary({0xFF, 0, 0xFF, 0}, {0xFF, 0, 0xFF, 0}));
  EXPECT_EQ(k.priority, 3u);
}

TEST_F(BuilderTest, DeleteAndPacket) {
  const TableUpdate d = BuildDelete(fw_, {{"src_ip", 1}, {"dst_ip", 2}});
  EXPECT_EQ(d.op, UpdateOp::kDelete);
  EXPECT_EQ(d.action_id, 0u);
  EXPECT_TRUE(d.params.empty());
  EXPECT_EQ(BuildModify(fw_, {{"src_ip", 1}, {"dst_ip", 2}}, "deny").op, UpdateOp::kModify);

  const auto packet = BuildPacket(TableByName(router_, "ports"), {{"port", 300}});
  ASSERT_EQ(packet.size(), 1u);
  EXPECT_EQ(packet[0].value, (Bytes{0x01, 0x2C}));
  EXPECT_EQ(CodeOf([&] { BuildPacket(fw_, {{"src_ip", 1}}); }), ErrorCode::kInvalidKey);
}

// Builder output is already canonical for every table shape.
TEST(BuilderPropertyTest, OutputIsCanonicalFixedPoint) {
  testing::Rng rng(31);
  for (int iter = 0; iter < 300; ++iter) {
    const TableSchema t = testing::RandomTable(rng, 1);
    KeyValues key;
    for (const auto& f : t.key_fields) {
      const Value v = Value::FromBytes(testing::RandomFieldValue(rng, f.bit_width));
      switch (*f.match_kind) {
        case MatchKind::kExact:
          key.emplace(f.name, v);
          break;
        case MatchKind::kLpm:
          key.emplace(f.name, KeyInput::Lpm(v, static_cast<std::uint16_t>(
                                                   testing::Uniform(rng, 0, f.bit_width))));
          break;
        case MatchKind::kTernary:
          key.emplace(f.name, KeyInput::Ternary(
                                  v, Value::FromBytes(testing::RandomFieldValue(rng, f.bit_width))));
          break;
      }
    }
    const MatchKey k = BuildKey(t, key, t.HasMatchKind(MatchKind::kTernary) ? 1 : 0);
    ASSERT_EQ(CanonicalizeKey(k, t), k);
  }
}

}  // namespace
}  // namespace matctl
