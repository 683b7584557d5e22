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

#ifndef MATCTL_WIRE_H_
#define MATCTL_WIRE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "matctl/bytes.h"
#include "matctl/schema.h"

namespace matctl {

// Frame header: magic u32 | version u8 | msg_type u8 | request_id u32 |
// payload_len u32. All integers big-endian.
inline constexpr std::uint32_t kFrameMagic = 0x42465254;
inline constexpr std::uint8_t kWireVersion = 0x01;
inline constexpr std::size_t kFrameHeaderSize = 14;
// Upper bound accepted by stream readers before allocating a payload buffer.
inline constexpr std::uint32_t kMaxPayloadSize = 256u << 20;
inline constexpr std::uint64_t kMaxBatchSize = std::uint64_t{1} << 31;

enum class MsgType : std::uint8_t {
  kHello = 0x01,
  kHelloAck = 0x02,
  kGetSchema = 0x03,
  kSchemaDoc = 0x04,
  kWrite = 0x05,
  kWriteAck = 0x06,
  kRead = 0x07,
  kReadAck = 0x08,
  kNotify = 0x0B,
  kTestPacket = 0x0C,
};

enum class UpdateOp : std::uint8_t { kInsert = 1, kModify = 2, kDelete = 3 };

// Per-update outcome codes carried in a WriteAck.
enum class StatusCode : std::uint8_t {
  kOk = 0,
  kAlreadyExists = 1,
  kNotFound = 2,
  kTableFull = 3,
  kInvalidKey = 4,
  kInvalidAction = 5,
  kSchemaMismatch = 6,
  kMalformed = 7,
};

enum class Overall : std::uint8_t { kOk = 0, kPartial = 1, kFailed = 2 };

enum class NotifyReason : std::uint8_t { kLookupMiss = 0 };

std::string_view StatusCodeName(StatusCode code);
std::string_view OverallName(Overall overall);
std::string_view UpdateOpName(UpdateOp op);

struct MatchValue {
  MatchKind kind = MatchKind::kExact;
  Bytes value;
  std::uint16_t prefix_len = 0;  // kLpm only
  Bytes mask;                    // kTernary only, same length as value

  static MatchValue Exact(Bytes value);
  static MatchValue Lpm(Bytes value, std::uint16_t prefix_len);
  static MatchValue Ternary(Bytes value, Bytes mask);

  bool operator==(const MatchValue&) const = default;
};

struct FieldMatch {
  std::uint32_t field_id = 0;
  MatchValue match;

  bool operator==(const FieldMatch&) const = default;
};

struct MatchKey {
  std::vector<FieldMatch> fields;
  // Only meaningful when a field is ternary; zero otherwise.
  std::uint32_t priority = 0;

  bool operator==(const MatchKey&) const = default;
};

struct ActionParam {
  std::uint32_t param_id = 0;
  Bytes value;

  bool operator==(const ActionParam&) const = default;
};

struct TableUpdate {
  UpdateOp op = UpdateOp::kInsert;
  std::uint32_t table_id = 0;
  MatchKey key;
  std::uint32_t action_id = 0;  // zero for kDelete
  std::vector<ActionParam> params;

  bool operator==(const TableUpdate&) const = default;
};

struct WriteBatch {
  bool atomic = false;
  std::vector<TableUpdate> updates;

  bool operator==(const WriteBatch&) const = default;
};

struct OpStatus {
  StatusCode code = StatusCode::kOk;
  std::string message;

  bool ok() const { return code == StatusCode::kOk; }
  bool operator==(const OpStatus&) const = default;
};

struct WriteReport {
  Overall overall = Overall::kOk;
  std::vector<OpStatus> per_op;

  bool operator==(const WriteReport&) const = default;
};

// Builds the report for a batch from its per-op outcomes.
WriteReport MakeReport(bool atomic, std::vector<OpStatus> per_op);

struct FieldValue {
  std::uint32_t field_id = 0;
  Bytes value;

  bool operator==(const FieldValue&) const = default;
};

struct Hello {
  std::string client_name;
  bool operator==(const Hello&) const = default;
};
struct HelloAck {
  std::uint64_t schema_digest = 0;
  std::string program_name;
  bool operator==(const HelloAck&) const = default;
};
struct GetSchema {
  bool operator==(const GetSchema&) const = default;
};
struct SchemaDoc {
  std::string document;
  bool operator==(const SchemaDoc&) const = default;
};
struct WriteRequest {
  WriteBatch batch;
  bool operator==(const WriteRequest&) const = default;
};
struct WriteAck {
  WriteReport report;
  bool operator==(const WriteAck&) const = default;
};
struct ReadRequest {
  std::uint32_t table_id = 0;
  std::optional<MatchKey> key;
  bool operator==(const ReadRequest&) const = default;
};
struct ReadAck {
  std::vector<TableUpdate> entries;  // all kInsert
  bool operator==(const ReadAck&) const = default;
};
struct TestPacket {
  std::uint32_t table_id = 0;
  std::vector<FieldValue> fields;
  bool operator==(const TestPacket&) const = default;
};
struct Notify {
  std::uint32_t table_id = 0;
  std::vector<FieldValue> fields;
  NotifyReason reason = NotifyReason::kLookupMiss;
  bool operator==(const Notify&) const = default;
};

using MessageBody = std::variant<Hello, HelloAck, GetSchema, SchemaDoc,
                                 WriteRequest, WriteAck, ReadRequest, ReadAck,
                                 TestPacket, Notify>;

struct Message {
  // Zero only on unsolicited Notify frames; acks echo their request's id.
  std::uint32_t request_id = 0;
  MessageBody body;

  MsgType type() const;
  bool operator==(const Message&) const = default;
};

// Serializes msg into one frame. Throws Error(kEncodeInvariant) when msg
// violates a type invariant.
Bytes Encode(const Message& msg);
Bytes Encode(std::uint32_t request_id, const MessageBody& body);
// Write frame built directly from a range of updates; identical bytes to
// Encode of the equivalent WriteRequest.
Bytes EncodeWrite(std::uint32_t request_id, bool atomic,
                  std::span<const TableUpdate> updates);

// Parses exactly one frame. Throws Error(kMalformed) with the byte offset of
// the first offending byte. Accepts only byte strings that Encode produces.
Message Decode(std::span<const std::uint8_t> frame);

struct FrameHeader {
  MsgType type;
  std::uint32_t request_id = 0;
  std::uint32_t payload_len = 0;
};

// Validates the 14-byte header prefix of a frame (magic, version, type, and
// kMaxPayloadSize). Used by stream readers before pulling the payload.
FrameHeader DecodeHeader(std::span<const std::uint8_t> header);

// Encoded length of one update inside a Write payload.
std::size_t EncodedSize(const TableUpdate& update);

// Normalizes key against table: fields put in schema order, values padded to
// schema width, LPM host bits and ternary masked-out bits cleared, priority
// zeroed for tables without ternary fields. Idempotent. Throws
// Error(kInvalidKey) on unknown, missing or duplicate fields, match kind
// mismatch, oversize values, or prefix_len > bit_width.
MatchKey CanonicalizeKey(const MatchKey& key, const TableSchema& table);
// Same contract, reusing key's storage when it is already laid out in schema
// order at schema widths.
void CanonicalizeKeyInPlace(MatchKey& key, const TableSchema& table);

}  // namespace matctl

#endif  // MATCTL_WIRE_H_
