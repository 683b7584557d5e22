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

#include "matctl/wire.h"

#include <algorithm>
#include <set>
#include <string>
#include <utility>

#include "matctl/error.h"

namespace matctl {

std::string_view StatusCodeName(StatusCode code) {
  switch (code) {
    case StatusCode::kOk: return "OK";
    case StatusCode::kAlreadyExists: return "ALREADY_EXISTS";
    case StatusCode::kNotFound: return "NOT_FOUND";
    case StatusCode::kTableFull: return "TABLE_FULL";
    case StatusCode::kInvalidKey: return "INVALID_KEY";
    case StatusCode::kInvalidAction: return "INVALID_ACTION";
    case StatusCode::kSchemaMismatch: return "SCHEMA_MISMATCH";
    case StatusCode::kMalformed: return "MALFORMED";
  }
  return "?";
}

std::string_view OverallName(Overall overall) {
  switch (overall) {
    case Overall::kOk: return "OK";
    case Overall::kPartial: return "PARTIAL";
    case Overall::kFailed: return "FAILED";
  }
  return "?";
}

std::string_view UpdateOpName(UpdateOp op) {
  switch (op) {
    case UpdateOp::kInsert: return "INSERT";
    case UpdateOp::kModify: return "MODIFY";
    case UpdateOp::kDelete: return "DELETE";
  }
  return "?";
}

MatchValue MatchValue::Exact(Bytes value) {
  return MatchValue{MatchKind::kExact, std::move(value), 0, {}};
}

MatchValue MatchValue::Lpm(Bytes value, std::uint16_t prefix_len) {
  return MatchValue{MatchKind::kLpm, std::move(value), prefix_len, {}};
}

MatchValue MatchValue::Ternary(Bytes value, Bytes mask) {
  return MatchValue{MatchKind::kTernary, std::move(value), 0, std::move(mask)};
}

WriteReport MakeReport(bool atomic, std::vector<OpStatus> per_op) {
  WriteReport report;
  const bool all_ok = std::all_of(per_op.begin(), per_op.end(),
                                  [](const OpStatus& s) { return s.ok(); });
  if (all_ok) {
    report.overall = Overall::kOk;
  } else {
    report.overall = atomic ? Overall::kFailed : Overall::kPartial;
  }
  report.per_op = std::move(per_op);
  return report;
}

namespace {

// Indexed by MessageBody alternative.
constexpr MsgType kTypes[] = {
    MsgType::kHello,     MsgType::kHelloAck, MsgType::kGetSchema,
    MsgType::kSchemaDoc, MsgType::kWrite,    MsgType::kWriteAck,
    MsgType::kRead,      MsgType::kReadAck,  MsgType::kTestPacket,
    MsgType::kNotify};

}  // namespace

MsgType Message::type() const { return kTypes[body.index()]; }

namespace {

// Widest value a key field or parameter can carry.
constexpr std::size_t kMaxValueBytes = kMaxBitWidth / 8;

[[noreturn]] void Violation(const std::string& what) {
  throw Error(ErrorCode::kEncodeInvariant, what);
}

// Shared invariant checks. Encode reports them as kEncodeInvariant; Decode
// re-raises them as kMalformed at the offset of the offending element.
std::optional<std::string> CheckValue(const Bytes& value) {
  if (value.empty() || value.size() > kMaxValueBytes) {
    return "value length " + std::to_string(value.size()) +
           " outside 1.." + std::to_string(kMaxValueBytes);
  }
  return std::nullopt;
}

std::optional<std::string> CheckMatchValue(const MatchValue& m) {
  if (auto err = CheckValue(m.value)) return err;
  switch (m.kind) {
    case MatchKind::kExact:
      if (m.prefix_len != 0 || !m.mask.empty()) {
        return std::string("exact match carries prefix or mask");
      }
      break;
    case MatchKind::kLpm:
      if (!m.mask.empty()) return std::string("lpm match carries a mask");
      if (m.prefix_len > m.value.size() * 8) {
        return "prefix_len " + std::to_string(m.prefix_len) +
               " exceeds value width";
      }
      break;
    case MatchKind::kTernary:
      if (m.prefix_len != 0) return std::string("ternary match carries prefix");
      if (m.mask.size() != m.value.size()) {
        return std::string("ternary value/mask length mismatch");
      }
      for (std::size_t i = 0; i < m.value.size(); ++i) {
        if ((m.value[i] & ~m.mask[i]) != 0) {
          return std::string("ternary value has bits outside mask");
        }
      }
      break;
    default:
      return "unknown match kind " + std::to_string(static_cast<int>(m.kind));
  }
  return std::nullopt;
}

std::optional<std::string> CheckKeyPriority(const MatchKey& key) {
  const bool ternary = std::any_of(
      key.fields.begin(), key.fields.end(),
      [](const FieldMatch& f) { return f.match.kind == MatchKind::kTernary; });
  if (!ternary && key.priority != 0) {
    return std::string("non-zero priority on key without ternary fields");
  }
  return std::nullopt;
}

class Writer {
 public:
  void U8(std::uint8_t v) { out_.push_back(v); }
  void U16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
  }
  void U32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void U64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void Raw(std::span<const std::uint8_t> bytes) {
    out_.insert(out_.end(), bytes.begin(), bytes.end());
  }
  void Str16(std::string_view s) {
    if (s.size() > UINT16_MAX) Violation("string longer than 65535 bytes");
    U16(static_cast<std::uint16_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void Value16(const Bytes& v) {
    U16(static_cast<std::uint16_t>(v.size()));
    Raw(v);
  }
  void Count32(std::size_t n) {
    if (n > UINT32_MAX) Violation("element count exceeds u32");
    U32(static_cast<std::uint32_t>(n));
  }
  void Count16(std::size_t n) {
    if (n > UINT16_MAX) Violation("element count exceeds u16");
    U16(static_cast<std::uint16_t>(n));
  }

  void Reserve(std::size_t n) { out_.reserve(n); }
  Bytes& bytes() { return out_; }

 private:
  Bytes out_;
};

void WriteKey(Writer& w, const MatchKey& key) {
  if (auto err = CheckKeyPriority(key)) Violation(*err);
  w.Count16(key.fields.size());
  for (const auto& f : key.fields) {
    if (auto err = CheckMatchValue(f.match)) {
      Violation("field " + std::to_string(f.field_id) + ": " + *err);
    }
    w.U32(f.field_id);
    w.U8(static_cast<std::uint8_t>(f.match.kind));
    w.Value16(f.match.value);
    if (f.match.kind == MatchKind::kLpm) w.U16(f.match.prefix_len);
    if (f.match.kind == MatchKind::kTernary) w.Raw(f.match.mask);
  }
  w.U32(key.priority);
}

void WriteUpdate(Writer& w, const TableUpdate& u) {
  if (u.op != UpdateOp::kInsert && u.op != UpdateOp::kModify &&
      u.op != UpdateOp::kDelete) {
    Violation("unknown update op " + std::to_string(static_cast<int>(u.op)));
  }
  if (u.op == UpdateOp::kDelete) {
    if (u.action_id != 0 || !u.params.empty()) {
      Violation("DELETE carries action data");
    }
  } else if (u.action_id == 0) {
    Violation("INSERT/MODIFY with action_id 0");
  }
  w.U8(static_cast<std::uint8_t>(u.op));
  w.U32(u.table_id);
  WriteKey(w, u.key);
  w.U32(u.action_id);
  w.Count16(u.params.size());
  for (const auto& p : u.params) {
    if (auto err = CheckValue(p.value)) {
      Violation("param " + std::to_string(p.param_id) + ": " + *err);
    }
    w.U32(p.param_id);
    w.Value16(p.value);
  }
}

void WriteFieldValues(Writer& w, const std::vector<FieldValue>& fields) {
  w.Count16(fields.size());
  for (const auto& f : fields) {
    if (auto err = CheckValue(f.value)) {
      Violation("field " + std::to_string(f.field_id) + ": " + *err);
    }
    w.U32(f.field_id);
    w.U8(static_cast<std::uint8_t>(MatchKind::kExact));
    w.Value16(f.value);
  }
}

void WriteBatchPayload(Writer& w, bool atomic,
                       std::span<const TableUpdate> updates) {
  const auto n = updates.size();
  if (n == 0 || n > kMaxBatchSize) {
    Violation("write batch must hold 1..2^31 updates, got " + std::to_string(n));
  }
  std::size_t size = kFrameHeaderSize + 1 + 4;
  for (const auto& u : updates) size += EncodedSize(u);
  w.Reserve(size);
  w.U8(atomic ? 1 : 0);
  w.Count32(n);
  for (const auto& u : updates) WriteUpdate(w, u);
}

struct PayloadEncoder {
  Writer& w;

  void operator()(const Hello& m) { w.Str16(m.client_name); }
  void operator()(const HelloAck& m) {
    w.U64(m.schema_digest);
    w.Str16(m.program_name);
  }
  void operator()(const GetSchema&) {}
  void operator()(const SchemaDoc& m) {
    w.Raw({reinterpret_cast<const std::uint8_t*>(m.document.data()),
           m.document.size()});
  }
  void operator()(const WriteRequest& m) {
    WriteBatchPayload(w, m.batch.atomic, m.batch.updates);
  }
  void operator()(const WriteAck& m) {
    const auto& r = m.report;
    const bool all_ok = std::all_of(r.per_op.begin(), r.per_op.end(),
                                    [](const OpStatus& s) { return s.ok(); });
    if (r.overall != Overall::kOk && r.overall != Overall::kPartial &&
        r.overall != Overall::kFailed) {
      Violation("unknown overall status");
    }
    if (all_ok != (r.overall == Overall::kOk)) {
      Violation("overall status inconsistent with per-op statuses");
    }
    w.U8(static_cast<std::uint8_t>(r.overall));
    w.Count32(r.per_op.size());
    for (const auto& s : r.per_op) {
      if (static_cast<std::uint8_t>(s.code) > 7) Violation("unknown status code");
      w.U8(static_cast<std::uint8_t>(s.code));
      w.Str16(s.message);
    }
  }
  void operator()(const ReadRequest& m) {
    w.U32(m.table_id);
    w.U8(m.key.has_value() ? 1 : 0);
    if (m.key.has_value()) WriteKey(w, *m.key);
  }
  void operator()(const ReadAck& m) {
    w.Count32(m.entries.size());
    for (const auto& e : m.entries) {
      if (e.op != UpdateOp::kInsert) Violation("read entry must be INSERT-shaped");
      WriteUpdate(w, e);
    }
  }
  void operator()(const TestPacket& m) {
    w.U32(m.table_id);
    WriteFieldValues(w, m.fields);
  }
  void operator()(const Notify& m) {
    w.U32(m.table_id);
    WriteFieldValues(w, m.fields);
    if (m.reason != NotifyReason::kLookupMiss) Violation("unknown notify reason");
    w.U8(static_cast<std::uint8_t>(m.reason));
  }
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> data, std::size_t base)
      : data_(data), base_(base) {}

  std::size_t offset() const { return base_ + pos_; }
  bool done() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

  [[noreturn]] void Fail(const std::string& what) const { FailAt(offset(), what); }
  [[noreturn]] void FailAt(std::size_t off, const std::string& what) const {
    throw Error(ErrorCode::kMalformed, what, off);
  }

  void Need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      FailAt(base_ + data_.size(), "truncated: need " + std::to_string(n) +
                                       " more bytes");
    }
  }
  std::uint8_t U8() {
    Need(1);
    return data_[pos_++];
  }
  std::uint16_t U16() {
    Need(2);
    std::uint16_t v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }
  std::uint64_t U64() {
    Need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }
  Bytes Raw(std::size_t n) {
    Need(n);
    Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
              data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }
  std::string Str(std::size_t n) {
    Need(n);
    std::string out(reinterpret_cast<const char*>(data_.data()) + pos_, n);
    pos_ += n;
    return out;
  }
  std::string Str16() { return Str(U16()); }
  Bytes Value16() { return Raw(U16()); }

  // Guards count-prefixed loops against absurd counts before reserving.
  void NeedAtLeast(std::uint64_t count, std::size_t min_each) const {
    if (count * min_each > data_.size() - pos_) {
      Fail("count " + std::to_string(count) + " exceeds remaining payload");
    }
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

MatchKey ReadKey(Reader& r) {
  const std::size_t key_at = r.offset();
  MatchKey key;
  const std::uint16_t n = r.U16();
  r.NeedAtLeast(n, 4 + 1 + 2);
  key.fields.reserve(n);
  for (std::uint16_t i = 0; i < n; ++i) {
    const std::size_t at = r.offset();
    FieldMatch f;
    f.field_id = r.U32();
    const std::size_t kind_at = r.offset();
    const std::uint8_t kind = r.U8();
    if (kind > 2) r.FailAt(kind_at, "unknown match kind " + std::to_string(kind));
    f.match.kind = static_cast<MatchKind>(kind);
    f.match.value = r.Value16();
    if (f.match.kind == MatchKind::kLpm) f.match.prefix_len = r.U16();
    if (f.match.kind == MatchKind::kTernary) f.match.mask = r.Raw(f.match.value.size());
    if (auto err = CheckMatchValue(f.match)) r.FailAt(at, *err);
    key.fields.push_back(std::move(f));
  }
  key.priority = r.U32();
  if (auto err = CheckKeyPriority(key)) r.FailAt(key_at, *err);
  return key;
}

TableUpdate ReadUpdate(Reader& r) {
  const std::size_t at = r.offset();
  TableUpdate u;
  const std::uint8_t op = r.U8();
  if (op < 1 || op > 3) r.FailAt(at, "unknown update op " + std::to_string(op));
  u.op = static_cast<UpdateOp>(op);
  u.table_id = r.U32();
  u.key = ReadKey(r);
  const std::size_t action_at = r.offset();
  u.action_id = r.U32();
  const std::uint16_t n = r.U16();
  if (u.op == UpdateOp::kDelete && (u.action_id != 0 || n != 0)) {
    r.FailAt(action_at, "DELETE carries action data");
  }
  if (u.op != UpdateOp::kDelete && u.action_id == 0) {
    r.FailAt(action_at, "INSERT/MODIFY with action_id 0");
  }
  r.NeedAtLeast(n, 4 + 2);
  u.params.reserve(n);
  for (std::uint16_t i = 0; i < n; ++i) {
    const std::size_t param_at = r.offset();
    ActionParam p;
    p.param_id = r.U32();
    p.value = r.Value16();
    if (auto err = CheckValue(p.value)) r.FailAt(param_at, *err);
    u.params.push_back(std::move(p));
  }
  return u;
}

std::vector<FieldValue> ReadFieldValues(Reader& r) {
  const std::uint16_t n = r.U16();
  r.NeedAtLeast(n, 4 + 1 + 2);
  std::vector<FieldValue> out;
  out.reserve(n);
  for (std::uint16_t i = 0; i < n; ++i) {
    const std::size_t at = r.offset();
    FieldValue f;
    f.field_id = r.U32();
    const std::size_t kind_at = r.offset();
    if (r.U8() != static_cast<std::uint8_t>(MatchKind::kExact)) {
      r.FailAt(kind_at, "packet field values must be exact");
    }
    f.value = r.Value16();
    if (auto err = CheckValue(f.value)) r.FailAt(at, *err);
    out.push_back(std::move(f));
  }
  return out;
}

MessageBody ReadBody(MsgType type, Reader& r) {
  switch (type) {
    case MsgType::kHello:
      return Hello{r.Str16()};
    case MsgType::kHelloAck: {
      HelloAck m;
      m.schema_digest = r.U64();
      m.program_name = r.Str16();
      return m;
    }
    case MsgType::kGetSchema:
      return GetSchema{};
    case MsgType::kSchemaDoc: {
      return SchemaDoc{r.Str(r.remaining())};
    }
    case MsgType::kWrite: {
      WriteRequest m;
      const std::size_t flags_at = r.offset();
      const std::uint8_t flags = r.U8();
      if (flags > 1) r.FailAt(flags_at, "unknown write flags");
      m.batch.atomic = (flags & 1) != 0;
      const std::size_t count_at = r.offset();
      const std::uint32_t n = r.U32();
      if (n == 0 || n > kMaxBatchSize) {
        r.FailAt(count_at, "write batch must hold 1..2^31 updates");
      }
      r.NeedAtLeast(n, 1 + 4 + 2 + 4 + 4 + 2);
      m.batch.updates.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) m.batch.updates.push_back(ReadUpdate(r));
      return m;
    }
    case MsgType::kWriteAck: {
      WriteAck m;
      const std::size_t at = r.offset();
      const std::uint8_t overall = r.U8();
      if (overall > 2) r.FailAt(at, "unknown overall status");
      m.report.overall = static_cast<Overall>(overall);
      const std::uint32_t n = r.U32();
      r.NeedAtLeast(n, 1 + 2);
      m.report.per_op.reserve(n);
      bool all_ok = true;
      for (std::uint32_t i = 0; i < n; ++i) {
        const std::size_t code_at = r.offset();
        const std::uint8_t code = r.U8();
        if (code > 7) r.FailAt(code_at, "unknown status code " + std::to_string(code));
        OpStatus s{static_cast<StatusCode>(code), r.Str16()};
        all_ok = all_ok && s.ok();
        m.report.per_op.push_back(std::move(s));
      }
      if (all_ok != (m.report.overall == Overall::kOk)) {
        r.FailAt(at, "overall status inconsistent with per-op statuses");
      }
      return m;
    }
    case MsgType::kRead: {
      ReadRequest m;
      m.table_id = r.U32();
      const std::size_t at = r.offset();
      const std::uint8_t has_key = r.U8();
      if (has_key > 1) r.FailAt(at, "has_key must be 0 or 1");
      if (has_key == 1) m.key = ReadKey(r);
      return m;
    }
    case MsgType::kReadAck: {
      ReadAck m;
      const std::uint32_t n = r.U32();
      r.NeedAtLeast(n, 1 + 4 + 2 + 4 + 4 + 2);
      m.entries.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        const std::size_t at = r.offset();
        TableUpdate u = ReadUpdate(r);
        if (u.op != UpdateOp::kInsert) r.FailAt(at, "read entry must be INSERT-shaped");
        m.entries.push_back(std::move(u));
      }
      return m;
    }
    case MsgType::kTestPacket: {
      TestPacket m;
      m.table_id = r.U32();
      m.fields = ReadFieldValues(r);
      return m;
    }
    case MsgType::kNotify: {
      Notify m;
      m.table_id = r.U32();
      m.fields = ReadFieldValues(r);
      const std::size_t at = r.offset();
      if (r.U8() != 0) r.FailAt(at, "unknown notify reason");
      m.reason = NotifyReason::kLookupMiss;
      return m;
    }
  }
  r.Fail("unknown message type");
}

bool IsKnownType(std::uint8_t t) {
  return (t >= 0x01 && t <= 0x08) || t == 0x0B || t == 0x0C;
}

}  // namespace

Bytes Encode(const Message& msg) { return Encode(msg.request_id, msg.body); }

namespace {

template <typename Fill>
Bytes Frame(MsgType type, std::uint32_t request_id, Fill&& fill) {
  const bool notify = type == MsgType::kNotify;
  if (notify && request_id != 0) Violation("Notify must carry request_id 0");
  if (!notify && request_id == 0) Violation("request_id 0 is reserved for Notify");

  Writer w;
  w.U32(kFrameMagic);
  w.U8(kWireVersion);
  w.U8(static_cast<std::uint8_t>(type));
  w.U32(request_id);
  w.U32(0);  // payload_len, patched below
  fill(w);
  Bytes& out = w.bytes();
  const std::size_t payload = out.size() - kFrameHeaderSize;
  if (payload > kMaxPayloadSize) Violation("payload exceeds maximum frame size");
  for (int i = 0; i < 4; ++i) {
    out[10 + i] = static_cast<std::uint8_t>(payload >> (24 - 8 * i));
  }
  return std::move(out);
}

}  // namespace

Bytes Encode(std::uint32_t request_id, const MessageBody& body) {
  return Frame(kTypes[body.index()], request_id,
               [&](Writer& w) { std::visit(PayloadEncoder{w}, body); });
}

Bytes EncodeWrite(std::uint32_t request_id, bool atomic,
                  std::span<const TableUpdate> updates) {
  return Frame(MsgType::kWrite, request_id,
               [&](Writer& w) { WriteBatchPayload(w, atomic, updates); });
}

FrameHeader DecodeHeader(std::span<const std::uint8_t> header) {
  Reader r(header.first(std::min(header.size(), kFrameHeaderSize)), 0);
  if (r.U32() != kFrameMagic) r.FailAt(0, "bad magic");
  if (r.U8() != kWireVersion) r.FailAt(4, "unsupported version");
  const std::uint8_t type = r.U8();
  if (!IsKnownType(type)) r.FailAt(5, "unknown message type " + std::to_string(type));
  FrameHeader h;
  h.type = static_cast<MsgType>(type);
  h.request_id = r.U32();
  h.payload_len = r.U32();
  if (h.payload_len > kMaxPayloadSize) r.FailAt(10, "payload length exceeds maximum");
  const bool notify = h.type == MsgType::kNotify;
  if (notify != (h.request_id == 0)) {
    r.FailAt(6, notify ? "Notify must carry request_id 0"
                       : "request_id 0 is reserved for Notify");
  }
  return h;
}

Message Decode(std::span<const std::uint8_t> frame) {
  const FrameHeader h = DecodeHeader(frame);
  const std::size_t total = kFrameHeaderSize + h.payload_len;
  if (frame.size() < total) {
    throw Error(ErrorCode::kMalformed, "truncated payload", frame.size());
  }
  if (frame.size() > total) {
    throw Error(ErrorCode::kMalformed, "trailing bytes after frame", total);
  }
  Reader r(frame.subspan(kFrameHeaderSize), kFrameHeaderSize);
  Message msg{h.request_id, ReadBody(h.type, r)};
  if (!r.done()) r.Fail("trailing bytes in payload");
  return msg;
}

std::size_t EncodedSize(const TableUpdate& update) {
  std::size_t n = 1 + 4 + 2;
  for (const auto& f : update.key.fields) {
    n += 4 + 1 + 2 + f.match.value.size();
    if (f.match.kind == MatchKind::kLpm) n += 2;
    if (f.match.kind == MatchKind::kTernary) n += f.match.mask.size();
  }
  n += 4 + 4 + 2;
  for (const auto& p : update.params) n += 4 + 2 + p.value.size();
  return n;
}

namespace {

[[noreturn]] void InvalidKey(const TableSchema& table, const std::string& what) {
  throw Error(ErrorCode::kInvalidKey, "table '" + table.name + "': " + what);
}

// Canonicalizes one value in place against its field spec.
void CanonicalizeValue(MatchValue& m, const FieldSpec& spec, const TableSchema& table) {
  if (m.kind != spec.match_kind) {
    InvalidKey(table, "field '" + spec.name + "' is " +
                          std::string(MatchKindName(*spec.match_kind)) + ", got " +
                          std::string(MatchKindName(m.kind)));
  }
  if (!FitsWidth(m.value, spec.bit_width)) {
    auto resized = ResizeToWidth(m.value, spec.bit_width);
    if (!resized.has_value()) {
      InvalidKey(table, "value " + ToHex(m.value) + " does not fit " +
                            std::to_string(spec.bit_width) + "-bit field '" +
                            spec.name + "'");
    }
    m.value = std::move(*resized);
  }
  switch (m.kind) {
    case MatchKind::kExact:
      m.prefix_len = 0;
      m.mask.clear();
      break;
    case MatchKind::kLpm:
      if (m.prefix_len > spec.bit_width) {
        InvalidKey(table, "prefix_len " + std::to_string(m.prefix_len) + " exceeds " +
                              std::to_string(spec.bit_width) + "-bit field '" +
                              spec.name + "'");
      }
      m.mask.clear();
      ClearLowBits(m.value, spec.bit_width - m.prefix_len);
      break;
    case MatchKind::kTernary:
      if (!FitsWidth(m.mask, spec.bit_width)) {
        auto mask = ResizeToWidth(m.mask, spec.bit_width);
        if (!mask.has_value()) {
          InvalidKey(table, "mask " + ToHex(m.mask) + " does not fit field '" +
                                spec.name + "'");
        }
        m.mask = std::move(*mask);
      }
      m.prefix_len = 0;
      for (std::size_t i = 0; i < m.value.size(); ++i) m.value[i] &= m.mask[i];
      break;
  }
}

}  // namespace

void CanonicalizeKeyInPlace(MatchKey& key, const TableSchema& table) {
  const auto& specs = table.key_fields;
  if (key.fields.size() != specs.size()) {
    InvalidKey(table, "expected " + std::to_string(specs.size()) +
                          " key fields, got " + std::to_string(key.fields.size()));
  }
  bool in_order = true;
  for (std::size_t i = 0; i < specs.size() && in_order; ++i) {
    in_order = key.fields[i].field_id == specs[i].id;
  }
  if (!in_order) {
    std::vector<FieldMatch> ordered;
    ordered.reserve(specs.size());
    for (const FieldSpec& spec : specs) {
      FieldMatch* given = nullptr;
      for (auto& f : key.fields) {
        if (f.field_id != spec.id) continue;
        if (given != nullptr) InvalidKey(table, "duplicate field id " + std::to_string(spec.id));
        given = &f;
      }
      if (given == nullptr) InvalidKey(table, "missing key field '" + spec.name + "'");
      ordered.push_back(std::move(*given));
    }
    key.fields = std::move(ordered);
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CanonicalizeValue(key.fields[i].match, specs[i], table);
  }
  if (!table.HasMatchKind(MatchKind::kTernary)) key.priority = 0;
}

MatchKey CanonicalizeKey(const MatchKey& key, const TableSchema& table) {
  MatchKey out = key;
  CanonicalizeKeyInPlace(out, table);
  return out;
}

}  // namespace matctl
