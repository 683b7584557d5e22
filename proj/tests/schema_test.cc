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


#include "matctl/schema.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <string>

#include "matctl/error.h"
#include "testing/fixtures.h"
#include "testing/generators.h"

namespace matctl {
namespace {

using ::testing::HasSubstr;

constexpr char kFirewall[] = R"({
  "program": "firewall",
  "tables": [{
    "id": 1, "name": "firewall_entries", "kind": "match_action", "capacity": 100000,
    "key": [{"id": 1, "name": "src_ip", "bits": 32, "match": "exact"},
            {"id": 2, "name": "dst_ip", "bits": 32, "match": "exact"}],
    "actions": [{"id": 1, "name": "permit", "params": []},
                {"id": 2, "name": "deny", "params": []}]
  }]
})";

// Expects parsing to fail with code and a message mentioning fragment.
void ExpectRejected(const std::string& doc, ErrorCode code, const std::string& fragment) {
  try {
    ParseSchema(doc);
    FAIL() << "accepted: " << doc;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
    EXPECT_THAT(e.what(), HasSubstr(fragment));
  }
}

// Reference FNV-1a, written out from the published constants.
std::uint64_t ReferenceFnv(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

TEST(SchemaTest, ParsesFirewall) {
  const ProgramSchema s = ParseSchema(kFirewall);
  EXPECT_EQ(s.program_name, "firewall");
  ASSERT_EQ(s.tables.size(), 1u);
  const TableSchema& t = s.tables[0];
  EXPECT_EQ(t.name, "firewall_entries");
  EXPECT_EQ(t.kind, TableKind::kMatchAction);
  EXPECT_EQ(t.capacity, 100000u);
  ASSERT_EQ(t.key_fields.size(), 2u);
  EXPECT_EQ(t.key_fields[0].name, "src_ip");
  EXPECT_EQ(t.key_fields[1].name, "dst_ip");
  for (const auto& f : t.key_fields) {
    EXPECT_EQ(f.bit_width, 32u);
    EXPECT_EQ(f.match_kind, MatchKind::kExact);
    EXPECT_EQ(f.byte_width(), 4u);
  }
  ASSERT_NE(t.FindAction("permit"), nullptr);
  EXPECT_EQ(t.FindAction("deny")->id, 2u);
}

TEST(SchemaTest, FixtureFileMatchesInlineDocument) {
  EXPECT_EQ(testing::FirewallSchema(), ParseSchema(kFirewall));
}

TEST(SchemaTest, EmptyTableListIsValid) {
  const ProgramSchema a = ParseSchema(R"({"program": "p", "tables": []})");
  const ProgramSchema b = ParseSchema(R"({"program": "p", "tables": []})");
  EXPECT_TRUE(a.tables.empty());
  EXPECT_EQ(a.schema_digest, b.schema_digest);
}

TEST(SchemaTest, TableByName) {
  const ProgramSchema s = ParseSchema(kFirewall);
  EXPECT_EQ(&TableByName(s, "firewall_entries"), &s.tables[0]);
  try {
    TableByName(s, "nonexistent");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  const ProgramSchema empty = ParseSchema(R"({"program": "p", "tables": []})");
  EXPECT_THROW(TableByName(empty, "firewall_entries"), Error);
}

TEST(SchemaTest, RouterFixtureCoversEveryKind) {
  const ProgramSchema s = testing::RouterSchema();
  EXPECT_EQ(TableByName(s, "ipv4_lpm").key_fields[0].match_kind, MatchKind::kLpm);
  EXPECT_TRUE(TableByName(s, "acl").HasMatchKind(MatchKind::kTernary));
  EXPECT_EQ(TableByName(s, "packet_counter").kind, TableKind::kRegister);
  EXPECT_EQ(TableByName(s, "ports").kind, TableKind::kPort);
  EXPECT_EQ(TableByName(s, "ports").key_fields[0].byte_width(), 2u);
}

TEST(SchemaTest, SyntaxErrorsAreMalformed) {
  ExpectRejected("{", ErrorCode::kMalformedSchema, "syntax");
  ExpectRejected("[]", ErrorCode::kMalformedSchema, "expected object");
  ExpectRejected(R"({"program": "p"})", ErrorCode::kMalformedSchema, "tables");
  ExpectRejected(R"({"program": "p", "tables": [], "extra": 1})",
                 ErrorCode::kMalformedSchema, "extra");
  ExpectRejected(R"({"program": 3, "tables": []})", ErrorCode::kMalformedSchema,
                 "program");
}

TEST(SchemaTest, DuplicateTableIdIsInvalid) {
  ExpectRejected(R"({"program": "p", "tables": [
    {"id": 7, "name": "a", "kind": "match_action", "capacity": 1, "key": [], "actions": []},
    {"id": 7, "name": "b", "kind": "match_action", "capacity": 1, "key": [], "actions": []}]})",
                 ErrorCode::kInvalidSchema, "tables[1].id");
}

TEST(SchemaTest, SemanticViolationsNameTheElement) {
  const std::string head = R"({"program": "p", "tables": [{"id": 1, "name": "t", "kind": )";
  ExpectRejected(head + R"("match_action", "capacity": 1, "key": [
      {"id": 1, "name": "k", "bits": 129, "match": "exact"}], "actions": []}]})",
                 ErrorCode::kInvalidSchema, "tables[0].key[0].bits");
  ExpectRejected(head + R"("match_action", "capacity": 1, "key": [
      {"id": 1, "name": "k", "bits": 0, "match": "exact"}], "actions": []}]})",
                 ErrorCode::kInvalidSchema, "tables[0].key[0].bits");
  ExpectRejected(head + R"("match_action", "capacity": 1, "key": [
      {"id": 1, "name": "k", "bits": 8, "match": "range"}], "actions": []}]})",
                 ErrorCode::kInvalidSchema, "match");
  ExpectRejected(head + R"("match_action", "capacity": 0, "key": [], "actions": []}]})",
                 ErrorCode::kInvalidSchema, "capacity");
  ExpectRejected(head + R"("match_action", "capacity": 1, "key": [
      {"id": 1, "name": "k", "bits": 8, "match": "exact"},
      {"id": 1, "name": "j", "bits": 8, "match": "exact"}], "actions": []}]})",
                 ErrorCode::kInvalidSchema, "tables[0].key[1].id");
  ExpectRejected(head + R"("match_action", "capacity": 1, "key": [], "actions": [
      {"id": 1, "name": "a", "params": []}, {"id": 1, "name": "b", "params": []}]}]})",
                 ErrorCode::kInvalidSchema, "tables[0].actions[1].id");
  ExpectRejected(head + R"("queue", "capacity": 1, "key": [], "actions": []}]})",
                 ErrorCode::kInvalidSchema, "kind");
}

TEST(SchemaTest, RegisterAndPortShapeRules) {
  const std::string head = R"({"program": "p", "tables": [{"id": 1, "name": "r", "kind": )";
  // Register with a ternary key.
  ExpectRejected(head + R"("register", "capacity": 4, "key": [
      {"id": 1, "name": "i", "bits": 8, "match": "ternary"}],
      "actions": [{"id": 1, "name": "set", "params": [{"id": 1, "name": "v", "bits": 8}]}]}]})",
                 ErrorCode::kInvalidSchema, "tables[0]");
  // Register whose action takes two params.
  ExpectRejected(head + R"("register", "capacity": 4, "key": [
      {"id": 1, "name": "i", "bits": 8, "match": "exact"}],
      "actions": [{"id": 1, "name": "set", "params": [{"id": 1, "name": "v", "bits": 8},
                                                     {"id": 2, "name": "w", "bits": 8}]}]}]})",
                 ErrorCode::kInvalidSchema, "tables[0]");
  // Port with two key fields.
  ExpectRejected(head + R"("port", "capacity": 4, "key": [
      {"id": 1, "name": "p", "bits": 9, "match": "exact"},
      {"id": 2, "name": "q", "bits": 9, "match": "exact"}], "actions": []}]})",
                 ErrorCode::kInvalidSchema, "tables[0]");
}

TEST(SchemaTest, DigestIsFnvOfCanonicalForm) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ull);
  const ProgramSchema s = ParseSchema(kFirewall);
  EXPECT_EQ(s.schema_digest, ReferenceFnv(SerializeSchema(s)));
  EXPECT_EQ(s.schema_digest, ComputeDigest(s));
}

TEST(SchemaTest, DigestIgnoresWhitespaceAndKeyOrder) {
  const std::string compact =
      R"({"tables":[{"actions":[{"params":[],"name":"permit","id":1},{"id":2,"name":"deny","params":[]}],)"
      R"("key":[{"match":"exact","bits":32,"name":"src_ip","id":1},{"id":2,"name":"dst_ip","bits":32,"match":"exact"}],)"
      R"("capacity":100000,"kind":"match_action","name":"firewall_entries","id":1}],"program":"firewall"})";
  EXPECT_EQ(ParseSchema(compact).schema_digest, ParseSchema(kFirewall).schema_digest);
}

TEST(SchemaTest, DigestChangesWithCapacity) {
  std::string doc = kFirewall;
  doc.replace(doc.find("100000"), 6, "100001");
  EXPECT_NE(ParseSchema(doc).schema_digest, ParseSchema(kFirewall).schema_digest);
}

TEST(SchemaTest, SerializeParseRoundTripOnRandomSchemas) {
  testing::Rng rng(7);
  for (int iter = 0; iter < 300; ++iter) {
    ProgramSchema s;
    s.program_name = "p" + std::to_string(iter);
    const auto n = testing::Uniform(rng, 0, 5);
    for (std::uint64_t i = 0; i < n; ++i) {
      s.tables.push_back(testing::RandomTable(rng, static_cast<std::uint32_t>(i + 1)));
    }
    s.schema_digest = ComputeDigest(s);
    const ProgramSchema back = ParseSchema(SerializeSchema(s));
    ASSERT_EQ(back, s) << SerializeSchema(s);
  }
}

TEST(SchemaTest, LoadSchemaFileReportsMissingFile) {
  try {
    LoadSchemaFile("/nonexistent/schema.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
}

}  // namespace
}  // namespace matctl
