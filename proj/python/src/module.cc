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

// Python bindings. Byte strings map to `bytes`; every blocking call drops
// the GIL so notification handlers can run while a request is in flight.

#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "matctl/bench.h"
#include "matctl/builder.h"
#include "matctl/bytes.h"
#include "matctl/client.h"
#include "matctl/error.h"
#include "matctl/schema.h"
#include "matctl/server.h"
#include "matctl/stats.h"
#include "matctl/target.h"
#include "matctl/wire.h"

namespace pybind11::detail {

// Bytes <-> bytes instead of the default list of ints.
template <>
struct type_caster<matctl::Bytes> {
  PYBIND11_TYPE_CASTER(matctl::Bytes, const_name("bytes"));

  bool load(handle src, bool) {
    char* data = nullptr;
    Py_ssize_t size = 0;
    if (PyBytes_Check(src.ptr())) {
      if (PyBytes_AsStringAndSize(src.ptr(), &data, &size) != 0) return false;
    } else if (PyByteArray_Check(src.ptr())) {
      data = PyByteArray_AsString(src.ptr());
      size = PyByteArray_Size(src.ptr());
    } else {
      return false;
    }
    auto* p = reinterpret_cast<const std::uint8_t*>(data);
    value.assign(p, p + size);
    return true;
  }

  static handle cast(const matctl::Bytes& v, return_value_policy, handle) {
    return PyBytes_FromStringAndSize(reinterpret_cast<const char*>(v.data()),
                                     static_cast<Py_ssize_t>(v.size()));
  }
};

}  // namespace pybind11::detail

namespace py = pybind11;

namespace matctl {
namespace {

PyObject* g_error_type = nullptr;

template <typename T>
struct ReleasingDelete {
  void operator()(T* p) const {
    py::gil_scoped_release release;
    delete p;
  }
};

using SessionPtr = std::unique_ptr<Session, ReleasingDelete<Session>>;
using SubscriptionPtr = std::unique_ptr<Subscription, ReleasingDelete<Subscription>>;

// Python callables captured by C++ threads must die with the GIL held.
struct GilDelete {
  void operator()(py::function* f) const {
    py::gil_scoped_acquire acquire;
    delete f;
  }
};

std::shared_ptr<py::function> Share(py::function fn) {
  return std::shared_ptr<py::function>(new py::function(std::move(fn)), GilDelete{});
}

Value ToValue(py::handle h) {
  if (py::isinstance<py::bytes>(h) || py::isinstance<py::bytearray>(h)) {
    return Value::FromBytes(h.cast<Bytes>());
  }
  if (py::isinstance<py::str>(h)) return Value::Ipv4(h.cast<std::string>());
  if (py::isinstance<py::int_>(h)) {
    if (PyObject_RichCompareBool(h.ptr(), py::int_(0).ptr(), Py_LT) == 1) {
      throw Error(ErrorCode::kInvalidArgument, "negative value");
    }
    const auto bits = h.attr("bit_length")().cast<std::size_t>();
    const std::size_t n = std::max<std::size_t>(1, (bits + 7) / 8);
    return Value::FromBytes(h.attr("to_bytes")(n, "big").cast<Bytes>());
  }
  throw Error(ErrorCode::kInvalidArgument,
              "value must be an int, bytes or a dotted-quad string");
}

KeyValues ToKeyValues(const py::dict& d) {
  KeyValues out;
  for (auto [k, v] : d) {
    auto name = k.cast<std::string>();
    if (py::isinstance<KeyInput>(v)) {
      out.emplace(std::move(name), v.cast<KeyInput>());
    } else {
      out.emplace(std::move(name), KeyInput(ToValue(v)));
    }
  }
  return out;
}

std::map<std::string, Value, std::less<>> ToValues(const py::dict& d) {
  std::map<std::string, Value, std::less<>> out;
  for (auto [k, v] : d) out.emplace(k.cast<std::string>(), ToValue(v));
  return out;
}

double Seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

// A target bound and serving for as long as the object lives.
class Target {
 public:
  Target(ProgramSchema schema, double delay_ms, const std::string& listen)
      : state_(std::make_shared<TargetState>(
            std::move(schema), std::chrono::duration_cast<std::chrono::nanoseconds>(
                                   std::chrono::duration<double, std::milli>(delay_ms)))),
        server_(std::make_unique<TargetServer>(state_, listen)) {
    server_->Start();
  }
  ~Target() { Shutdown(); }

  void Shutdown() {
    if (server_) {
      server_->Shutdown();
      server_.reset();
    }
  }
  TargetServer& server() const {
    if (!server_) throw Error(ErrorCode::kTransportError, "target is shut down");
    return *server_;
  }
  TargetState& state() const { return *state_; }

 private:
  std::shared_ptr<TargetState> state_;
  std::unique_ptr<TargetServer> server_;
};

void BindSchema(py::module_& m) {
  py::enum_<MatchKind>(m, "MatchKind")
      .value("EXACT", MatchKind::kExact)
      .value("LPM", MatchKind::kLpm)
      .value("TERNARY", MatchKind::kTernary);
  py::enum_<TableKind>(m, "TableKind")
      .value("MATCH_ACTION", TableKind::kMatchAction)
      .value("REGISTER", TableKind::kRegister)
      .value("PORT", TableKind::kPort);

  py::class_<FieldSpec>(m, "FieldSpec")
      .def_readonly("id", &FieldSpec::id)
      .def_readonly("name", &FieldSpec::name)
      .def_readonly("bit_width", &FieldSpec::bit_width)
      .def_readonly("match_kind", &FieldSpec::match_kind)
      .def_property_readonly("byte_width", &FieldSpec::byte_width)
      .def("__repr__", [](const FieldSpec& f) {
        return "<FieldSpec " + f.name + ":" + std::to_string(f.bit_width) + ">";
      });
  py::class_<ActionSpec>(m, "ActionSpec")
      .def_readonly("id", &ActionSpec::id)
      .def_readonly("name", &ActionSpec::name)
      .def_readonly("params", &ActionSpec::params);
  py::class_<TableSchema>(m, "TableSchema")
      .def_readonly("id", &TableSchema::id)
      .def_readonly("name", &TableSchema::name)
      .def_readonly("kind", &TableSchema::kind)
      .def_readonly("capacity", &TableSchema::capacity)
      .def_readonly("key_fields", &TableSchema::key_fields)
      .def_readonly("actions", &TableSchema::actions)
      .def("__repr__", [](const TableSchema& t) { return "<TableSchema " + t.name + ">"; });
  py::class_<ProgramSchema>(m, "ProgramSchema")
      .def_readonly("program_name", &ProgramSchema::program_name)
      .def_readonly("tables", &ProgramSchema::tables)
      .def_readonly("schema_digest", &ProgramSchema::schema_digest)
      .def(
          "table",
          [](const ProgramSchema& s, const std::string& name) -> const TableSchema& {
            return TableByName(s, name);
          },
          py::return_value_policy::reference_internal)
      .def("to_json", &SerializeSchema)
      .def(py::self == py::self);

  m.def("parse_schema", &ParseSchema, py::arg("document"));
  m.def("load_schema", &LoadSchemaFile, py::arg("path"));
  m.def("compute_digest", &ComputeDigest);
  m.def("fnv1a64", [](const py::bytes& b) { return Fnv1a64(std::string(b)); });
}

void BindWire(py::module_& m) {
  py::enum_<MsgType>(m, "MsgType")
      .value("HELLO", MsgType::kHello)
      .value("HELLO_ACK", MsgType::kHelloAck)
      .value("GET_SCHEMA", MsgType::kGetSchema)
      .value("SCHEMA_DOC", MsgType::kSchemaDoc)
      .value("WRITE", MsgType::kWrite)
      .value("WRITE_ACK", MsgType::kWriteAck)
      .value("READ", MsgType::kRead)
      .value("READ_ACK", MsgType::kReadAck)
      .value("NOTIFY", MsgType::kNotify)
      .value("TEST_PACKET", MsgType::kTestPacket);
  py::enum_<UpdateOp>(m, "UpdateOp")
      .value("INSERT", UpdateOp::kInsert)
      .value("MODIFY", UpdateOp::kModify)
      .value("DELETE", UpdateOp::kDelete);
  py::enum_<StatusCode>(m, "StatusCode")
      .value("OK", StatusCode::kOk)
      .value("ALREADY_EXISTS", StatusCode::kAlreadyExists)
      .value("NOT_FOUND", StatusCode::kNotFound)
      .value("TABLE_FULL", StatusCode::kTableFull)
      .value("INVALID_KEY", StatusCode::kInvalidKey)
      .value("INVALID_ACTION", StatusCode::kInvalidAction)
      .value("SCHEMA_MISMATCH", StatusCode::kSchemaMismatch)
      .value("MALFORMED", StatusCode::kMalformed);
  py::enum_<Overall>(m, "Overall")
      .value("OK", Overall::kOk)
      .value("PARTIAL", Overall::kPartial)
      .value("FAILED", Overall::kFailed);
  py::enum_<NotifyReason>(m, "NotifyReason").value("LOOKUP_MISS", NotifyReason::kLookupMiss);

  py::class_<MatchValue>(m, "MatchValue")
      .def_static("exact", &MatchValue::Exact, py::arg("value"))
      .def_static("lpm", &MatchValue::Lpm, py::arg("value"), py::arg("prefix_len"))
      .def_static("ternary", &MatchValue::Ternary, py::arg("value"), py::arg("mask"))
      .def_readwrite("kind", &MatchValue::kind)
      .def_readwrite("value", &MatchValue::value)
      .def_readwrite("prefix_len", &MatchValue::prefix_len)
      .def_readwrite("mask", &MatchValue::mask)
      .def(py::self == py::self);
  py::class_<FieldMatch>(m, "FieldMatch")
      .def(py::init([](std::uint32_t id, MatchValue match) {
             return FieldMatch{id, std::move(match)};
           }),
           py::arg("field_id"), py::arg("match"))
      .def_readwrite("field_id", &FieldMatch::field_id)
      .def_readwrite("match", &FieldMatch::match)
      .def(py::self == py::self);
  py::class_<MatchKey>(m, "MatchKey")
      .def(py::init([](std::vector<FieldMatch> fields, std::uint32_t priority) {
             return MatchKey{std::move(fields), priority};
           }),
           py::arg("fields") = std::vector<FieldMatch>{}, py::arg("priority") = 0)
      .def_readwrite("fields", &MatchKey::fields)
      .def_readwrite("priority", &MatchKey::priority)
      .def(py::self == py::self);
  py::class_<ActionParam>(m, "ActionParam")
      .def(py::init([](std::uint32_t id, Bytes value) {
             return ActionParam{id, std::move(value)};
           }),
           py::arg("param_id"), py::arg("value"))
      .def_readwrite("param_id", &ActionParam::param_id)
      .def_readwrite("value", &ActionParam::value)
      .def(py::self == py::self);
  py::class_<TableUpdate>(m, "TableUpdate")
      .def(py::init([](UpdateOp op, std::uint32_t table_id, MatchKey key,
                       std::uint32_t action_id, std::vector<ActionParam> params) {
             return TableUpdate{op, table_id, std::move(key), action_id, std::move(params)};
           }),
           py::arg("op"), py::arg("table_id"), py::arg("key"), py::arg("action_id") = 0,
           py::arg("params") = std::vector<ActionParam>{})
      .def_readwrite("op", &TableUpdate::op)
      .def_readwrite("table_id", &TableUpdate::table_id)
      .def_readwrite("key", &TableUpdate::key)
      .def_readwrite("action_id", &TableUpdate::action_id)
      .def_readwrite("params", &TableUpdate::params)
      .def_property_readonly("encoded_size", &EncodedSize)
      .def(py::self == py::self);
  py::class_<WriteBatch>(m, "WriteBatch")
      .def(py::init([](std::vector<TableUpdate> updates, bool atomic) {
             return WriteBatch{atomic, std::move(updates)};
           }),
           py::arg("updates") = std::vector<TableUpdate>{}, py::arg("atomic") = false)
      .def_readwrite("atomic", &WriteBatch::atomic)
      .def_readwrite("updates", &WriteBatch::updates)
      .def(py::self == py::self);
  py::class_<OpStatus>(m, "OpStatus")
      .def(py::init([](StatusCode code, std::string message) {
             return OpStatus{code, std::move(message)};
           }),
           py::arg("code") = StatusCode::kOk, py::arg("message") = "")
      .def_readwrite("code", &OpStatus::code)
      .def_readwrite("message", &OpStatus::message)
      .def_property_readonly("ok", &OpStatus::ok)
      .def(py::self == py::self);
  py::class_<WriteReport>(m, "WriteReport")
      .def(py::init<>())
      .def_readwrite("overall", &WriteReport::overall)
      .def_readwrite("per_op", &WriteReport::per_op)
      .def(py::self == py::self)
      .def("__repr__", [](const WriteReport& r) {
        return "<WriteReport " + std::string(OverallName(r.overall)) + " (" +
               std::to_string(r.per_op.size()) + " ops)>";
      });
  py::class_<FieldValue>(m, "FieldValue")
      .def(py::init([](std::uint32_t id, Bytes value) {
             return FieldValue{id, std::move(value)};
           }),
           py::arg("field_id"), py::arg("value"))
      .def_readwrite("field_id", &FieldValue::field_id)
      .def_readwrite("value", &FieldValue::value)
      .def(py::self == py::self);

  py::class_<Hello>(m, "Hello")
      .def(py::init([](std::string name) { return Hello{std::move(name)}; }),
           py::arg("client_name") = "")
      .def_readwrite("client_name", &Hello::client_name)
      .def(py::self == py::self);
  py::class_<HelloAck>(m, "HelloAck")
      .def(py::init([](std::uint64_t digest, std::string program) {
             return HelloAck{digest, std::move(program)};
           }),
           py::arg("schema_digest") = 0, py::arg("program_name") = "")
      .def_readwrite("schema_digest", &HelloAck::schema_digest)
      .def_readwrite("program_name", &HelloAck::program_name)
      .def(py::self == py::self);
  py::class_<GetSchema>(m, "GetSchema").def(py::init<>()).def(py::self == py::self);
  py::class_<SchemaDoc>(m, "SchemaDoc")
      .def(py::init([](std::string doc) { return SchemaDoc{std::move(doc)}; }),
           py::arg("document") = "")
      .def_readwrite("document", &SchemaDoc::document)
      .def(py::self == py::self);
  py::class_<WriteRequest>(m, "WriteRequest")
      .def(py::init([](WriteBatch batch) { return WriteRequest{std::move(batch)}; }),
           py::arg("batch") = WriteBatch{})
      .def_readwrite("batch", &WriteRequest::batch)
      .def(py::self == py::self);
  py::class_<WriteAck>(m, "WriteAck")
      .def(py::init([](WriteReport report) { return WriteAck{std::move(report)}; }),
           py::arg("report") = WriteReport{})
      .def_readwrite("report", &WriteAck::report)
      .def(py::self == py::self);
  py::class_<ReadRequest>(m, "ReadRequest")
      .def(py::init([](std::uint32_t table_id, std::optional<MatchKey> key) {
             return ReadRequest{table_id, std::move(key)};
           }),
           py::arg("table_id") = 0, py::arg("key") = py::none())
      .def_readwrite("table_id", &ReadRequest::table_id)
      .def_readwrite("key", &ReadRequest::key)
      .def(py::self == py::self);
  py::class_<ReadAck>(m, "ReadAck")
      .def(py::init([](std::vector<TableUpdate> entries) {
             return ReadAck{std::move(entries)};
           }),
           py::arg("entries") = std::vector<TableUpdate>{})
      .def_readwrite("entries", &ReadAck::entries)
      .def(py::self == py::self);
  py::class_<TestPacket>(m, "TestPacket")
      .def(py::init([](std::uint32_t table_id, std::vector<FieldValue> fields) {
             return TestPacket{table_id, std::move(fields)};
           }),
           py::arg("table_id") = 0, py::arg("fields") = std::vector<FieldValue>{})
      .def_readwrite("table_id", &TestPacket::table_id)
      .def_readwrite("fields", &TestPacket::fields)
      .def(py::self == py::self);
  py::class_<Notify>(m, "Notify")
      .def(py::init([](std::uint32_t table_id, std::vector<FieldValue> fields) {
             return Notify{table_id, std::move(fields), NotifyReason::kLookupMiss};
           }),
           py::arg("table_id") = 0, py::arg("fields") = std::vector<FieldValue>{})
      .def_readwrite("table_id", &Notify::table_id)
      .def_readwrite("fields", &Notify::fields)
      .def_readwrite("reason", &Notify::reason)
      .def(py::self == py::self);

  py::class_<Message>(m, "Message")
      .def(py::init([](std::uint32_t request_id, MessageBody body) {
             return Message{request_id, std::move(body)};
           }),
           py::arg("request_id"), py::arg("body"))
      .def_readwrite("request_id", &Message::request_id)
      .def_readwrite("body", &Message::body)
      .def_property_readonly("type", &Message::type)
      .def(py::self == py::self);

  py::class_<FrameHeader>(m, "FrameHeader")
      .def_readonly("type", &FrameHeader::type)
      .def_readonly("request_id", &FrameHeader::request_id)
      .def_readonly("payload_len", &FrameHeader::payload_len);

  m.def("encode", py::overload_cast<const Message&>(&Encode), py::arg("message"));
  m.def("decode", [](const Bytes& frame) { return Decode(frame); }, py::arg("frame"));
  m.def("decode_header", [](const Bytes& header) { return DecodeHeader(header); },
        py::arg("header"));
  m.def("make_report", &MakeReport, py::arg("atomic"), py::arg("per_op"));
  m.def("canonicalize_key", &CanonicalizeKey, py::arg("key"), py::arg("table"));
  m.attr("FRAME_HEADER_SIZE") = kFrameHeaderSize;
}

void BindBuilder(py::module_& m) {
  py::class_<KeyInput>(m, "KeyInput")
      .def_readonly("kind", &KeyInput::kind)
      .def_property_readonly("value", [](const KeyInput& k) { return k.value.bytes(); })
      .def_readonly("prefix_len", &KeyInput::prefix_len)
      .def_property_readonly("mask", [](const KeyInput& k) { return k.mask.bytes(); });
  m.def("exact", [](py::handle v) { return KeyInput::Exact(ToValue(v)); }, py::arg("value"));
  m.def(
      "lpm", [](py::handle v, std::uint16_t len) { return KeyInput::Lpm(ToValue(v), len); },
      py::arg("value"), py::arg("prefix_len"));
  m.def(
      "ternary",
      [](py::handle v, py::handle mask) { return KeyInput::Ternary(ToValue(v), ToValue(mask)); },
      py::arg("value"), py::arg("mask"));

  m.def(
      "build_key",
      [](const TableSchema& t, const py::dict& key, std::uint32_t priority) {
        return BuildKey(t, ToKeyValues(key), priority);
      },
      py::arg("table"), py::arg("key"), py::arg("priority") = 0);
  m.def(
      "build_insert",
      [](const TableSchema& t, const py::dict& key, const std::string& action,
         const py::dict& params, std::uint32_t priority) {
        return BuildInsert(t, ToKeyValues(key), action, ToValues(params), priority);
      },
      py::arg("table"), py::arg("key"), py::arg("action"), py::arg("params") = py::dict(),
      py::arg("priority") = 0);
  m.def(
      "build_modify",
      [](const TableSchema& t, const py::dict& key, const std::string& action,
         const py::dict& params, std::uint32_t priority) {
        return BuildModify(t, ToKeyValues(key), action, ToValues(params), priority);
      },
      py::arg("table"), py::arg("key"), py::arg("action"), py::arg("params") = py::dict(),
      py::arg("priority") = 0);
  m.def(
      "build_delete",
      [](const TableSchema& t, const py::dict& key, std::uint32_t priority) {
        return BuildDelete(t, ToKeyValues(key), priority);
      },
      py::arg("table"), py::arg("key"), py::arg("priority") = 0);
  m.def(
      "build_packet",
      [](const TableSchema& t, const py::dict& fields) {
        return BuildPacket(t, ToValues(fields));
      },
      py::arg("table"), py::arg("fields"));
}

void BindRuntime(py::module_& m) {
  py::class_<Target>(m, "Target")
      .def(py::init<ProgramSchema, double, const std::string&>(), py::arg("schema"),
           py::arg("delay_ms") = 0.0, py::arg("listen") = "127.0.0.1:0")
      .def_property_readonly("endpoint", [](const Target& t) { return t.server().endpoint(); })
      .def_property_readonly("port", [](const Target& t) { return t.server().port(); })
      .def_property_readonly("active_sessions",
                             [](const Target& t) { return t.server().active_sessions(); })
      .def_property_readonly("schema",
                             [](const Target& t) { return t.state().schema(); })
      .def(
          "occupancy", [](const Target& t, std::uint32_t id) { return t.state().Occupancy(id); },
          py::arg("table_id"))
      .def(
          "apply_write",
          [](Target& t, const WriteBatch& batch) { return t.state().ApplyWrite(batch); },
          py::arg("batch"), py::call_guard<py::gil_scoped_release>())
      .def(
          "read_entries",
          [](const Target& t, std::uint32_t id, const std::optional<MatchKey>& key) {
            return t.state().ReadEntries(id, key);
          },
          py::arg("table_id"), py::arg("key") = py::none(),
          py::call_guard<py::gil_scoped_release>())
      .def("shutdown", &Target::Shutdown, py::call_guard<py::gil_scoped_release>())
      .def("__enter__", [](Target& t) -> Target& { return t; },
           py::return_value_policy::reference)
      .def(
          "__exit__",
          [](Target& t, py::args) {
            py::gil_scoped_release release;
            t.Shutdown();
          });

  py::class_<TimedReport>(m, "TimedReport")
      .def_readonly("report", &TimedReport::report)
      .def_property_readonly("elapsed_seconds",
                             [](const TimedReport& r) { return Seconds(r.elapsed()); });

  py::class_<Subscription, SubscriptionPtr>(m, "Subscription")
      .def("cancel", &Subscription::Cancel, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("active", &Subscription::active);

  py::class_<Session, SessionPtr>(m, "Session")
      .def_static(
          "connect",
          [](const std::string& endpoint, std::optional<std::string> program,
             std::string client_name) {
            py::gil_scoped_release release;
            return SessionPtr(
                Session::Connect(endpoint, std::move(program), std::move(client_name))
                    .release());
          },
          py::arg("endpoint"), py::arg("expected_program") = py::none(),
          py::arg("client_name") = "matctl")
      .def_property_readonly("schema", &Session::schema)
      .def("table", &Session::table, py::arg("name"), py::return_value_policy::reference_internal)
      .def("write", &Session::Write, py::arg("batch"), py::call_guard<py::gil_scoped_release>())
      .def(
          "insert_all",
          [](Session& s, const std::vector<TableUpdate>& updates, std::size_t batch_size,
             bool atomic) { return s.InsertAll(updates, batch_size, atomic); },
          py::arg("updates"), py::arg("batch_size"), py::arg("atomic") = false,
          py::call_guard<py::gil_scoped_release>())
      .def("read", &Session::Read, py::arg("table"), py::arg("key") = py::none(),
           py::call_guard<py::gil_scoped_release>())
      .def(
          "send_test_packet",
          [](Session& s, const std::string& table, const py::dict& fields) {
            auto packet = BuildPacket(s.table(table), ToValues(fields));
            py::gil_scoped_release release;
            return s.SendTestPacket(table, std::move(packet));
          },
          py::arg("table"), py::arg("fields"))
      .def(
          "send_test_packet",
          [](Session& s, const std::string& table, std::vector<FieldValue> fields) {
            py::gil_scoped_release release;
            return s.SendTestPacket(table, std::move(fields));
          },
          py::arg("table"), py::arg("fields"))
      .def(
          "subscribe",
          [](Session& s, py::function on_notify, std::optional<py::function> on_error) {
            auto notify_fn = Share(std::move(on_notify));
            NotifyHandler handler = [notify_fn](const Notify& n) {
              py::gil_scoped_acquire acquire;
              try {
                (*notify_fn)(n);
              } catch (py::error_already_set& e) {
                e.discard_as_unraisable("matctl notify handler");
              }
            };
            SubscriptionErrorHandler error_handler;
            if (on_error) {
              auto error_fn = Share(std::move(*on_error));
              error_handler = [error_fn](const Error& err) {
                py::gil_scoped_acquire acquire;
                try {
                  (*error_fn)(std::string(ErrorCodeName(err.code())), std::string(err.what()));
                } catch (py::error_already_set& e) {
                  e.discard_as_unraisable("matctl error handler");
                }
              };
            }
            py::gil_scoped_release release;
            return SubscriptionPtr(
                new Subscription(s.Subscribe(std::move(handler), std::move(error_handler))));
          },
          py::arg("on_notify"), py::arg("on_error") = py::none(), py::keep_alive<0, 1>())
      .def("close", &Session::Close, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("alive", &Session::alive)
      .def_property_readonly("last_request_id", &Session::last_request_id)
      .def("__enter__", [](Session& s) -> Session& { return s; },
           py::return_value_policy::reference)
      .def("__exit__", [](Session& s, py::args) {
        py::gil_scoped_release release;
        s.Close();
      });
}

void BindStats(py::module_& m) {
  auto s = m.def_submodule("stats", "Student-t confidence intervals");
  s.def("regularized_incomplete_beta", &stats::RegularizedIncompleteBeta, py::arg("a"),
        py::arg("b"), py::arg("x"));
  s.def("student_t_cdf", &stats::StudentTCdf, py::arg("t"), py::arg("df"));
  s.def("student_t_quantile", &stats::StudentTQuantile, py::arg("p"), py::arg("df"));
  s.def("mean", [](const std::vector<double>& v) { return stats::Mean(v); });
  s.def("stddev", [](const std::vector<double>& v) { return stats::StdDev(v); });
  s.def(
      "confidence_interval",
      [](const std::vector<double>& v, double alpha) {
        auto ci = stats::ComputeConfidenceInterval(v, alpha);
        return py::make_tuple(ci.mean, ci.halfwidth);
      },
      py::arg("samples"), py::arg("per_test_alpha"));
  s.def("bonferroni_alpha", &stats::BonferroniAlpha, py::arg("overall_alpha"),
        py::arg("tests"));
}

void BindBench(py::module_& m) {
  auto b = m.def_submodule("bench", "Batch-size throughput benchmark");
  py::class_<bench::ExperimentConfig>(b, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("total_entries", &bench::ExperimentConfig::total_entries)
      .def_readwrite("batch_sizes", &bench::ExperimentConfig::batch_sizes)
      .def_readwrite("runs", &bench::ExperimentConfig::runs)
      .def_readwrite("overall_significance", &bench::ExperimentConfig::overall_significance)
      .def_readwrite("response_delay_ms", &bench::ExperimentConfig::response_delay_ms)
      .def_readwrite("rng_seed", &bench::ExperimentConfig::rng_seed)
      .def_readwrite("table", &bench::ExperimentConfig::table)
      .def_readwrite("log_requests", &bench::ExperimentConfig::log_requests)
      .def("validate", &bench::ExperimentConfig::Validate);
  py::class_<bench::BenchRecord>(b, "BenchRecord")
      .def_readonly("batch_size", &bench::BenchRecord::batch_size)
      .def_readonly("mean_insertion_rate", &bench::BenchRecord::mean_insertion_rate)
      .def_readonly("mean_response_time", &bench::BenchRecord::mean_response_time)
      .def_readonly("ci_halfwidth_rate", &bench::BenchRecord::ci_halfwidth_rate)
      .def_readonly("ci_halfwidth_rt", &bench::BenchRecord::ci_halfwidth_rt)
      .def_readonly("runs_used", &bench::BenchRecord::runs_used);
  py::class_<bench::RunSample>(b, "RunSample")
      .def_readonly("batch_size", &bench::RunSample::batch_size)
      .def_readonly("run", &bench::RunSample::run)
      .def_readonly("cumulative_seconds", &bench::RunSample::cumulative_seconds)
      .def_readonly("insertion_rate", &bench::RunSample::insertion_rate)
      .def_readonly("response_time_seconds", &bench::RunSample::response_time_seconds);
  py::class_<bench::RequestSample>(b, "RequestSample")
      .def_readonly("batch_size", &bench::RequestSample::batch_size)
      .def_readonly("run", &bench::RequestSample::run)
      .def_readonly("request", &bench::RequestSample::request)
      .def_readonly("entries", &bench::RequestSample::entries)
      .def_readonly("elapsed_seconds", &bench::RequestSample::elapsed_seconds);
  py::class_<bench::ExperimentResult>(b, "ExperimentResult")
      .def_readonly("records", &bench::ExperimentResult::records)
      .def_readonly("samples", &bench::ExperimentResult::samples)
      .def_readonly("requests", &bench::ExperimentResult::requests)
      .def_readonly("per_test_alpha", &bench::ExperimentResult::per_test_alpha)
      .def_readonly("halfwidths_below_1pct", &bench::ExperimentResult::halfwidths_below_1pct);
  py::class_<bench::RunOutcome>(b, "RunOutcome")
      .def_readonly("cumulative_seconds", &bench::RunOutcome::cumulative_seconds)
      .def_readonly("reports", &bench::RunOutcome::reports);

  b.def("default_batch_sizes", &bench::DefaultBatchSizes);
  b.def("insertion_rate", &bench::InsertionRate, py::arg("n"), py::arg("cumulative_seconds"));
  b.def("response_time", &bench::ResponseTime, py::arg("n"), py::arg("batch_size"),
        py::arg("cumulative_seconds"));
  b.def("request_count", &bench::RequestCount, py::arg("n"), py::arg("batch_size"));
  b.def("generate_workload", &bench::GenerateWorkload, py::arg("table"), py::arg("n"),
        py::arg("seed"));
  b.def("clear_table", &bench::ClearTable, py::arg("session"), py::arg("table"),
        py::call_guard<py::gil_scoped_release>());
  b.def(
      "run_once",
      [](Session& s, const TableSchema& t, const std::vector<TableUpdate>& workload,
         std::size_t batch_size) { return bench::RunOnce(s, t, workload, batch_size); },
      py::arg("session"), py::arg("table"), py::arg("workload"), py::arg("batch_size"),
      py::call_guard<py::gil_scoped_release>());
  b.def(
      "run_experiment",
      [](const bench::ExperimentConfig& config, Session& s, std::optional<py::function> cb) {
        bench::ProgressFn progress;
        if (cb) {
          auto fn = Share(std::move(*cb));
          progress = [fn](std::size_t batch, std::size_t run, double seconds) {
            py::gil_scoped_acquire acquire;
            (*fn)(batch, run, seconds);
          };
        }
        py::gil_scoped_release release;
        return bench::RunExperiment(config, s, progress);
      },
      py::arg("config"), py::arg("session"), py::arg("progress") = py::none());
  b.def(
      "write_outputs",
      [](const bench::ExperimentConfig& config, const bench::ExperimentResult& result,
         const std::filesystem::path& out_dir, std::string endpoint, std::string target_mode,
         std::string schema_path) {
        bench::WriteOutputs(config, result,
                            {std::move(endpoint), std::move(target_mode), std::move(schema_path)},
                            out_dir);
      },
      py::arg("config"), py::arg("result"), py::arg("out_dir"), py::arg("endpoint") = "",
      py::arg("target_mode") = "in-process", py::arg("schema_path") = "");
}

}  // namespace
}  // namespace matctl

PYBIND11_MODULE(_matctl, m) {
  using namespace matctl;
  m.doc() = "Match-action table control: schema, wire codec, target and client";

  g_error_type = PyErr_NewException("matctl.Error", PyExc_RuntimeError, nullptr);
  m.add_object("Error", py::handle(g_error_type));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = py::reinterpret_borrow<py::object>(g_error_type);
      py::object inst = type(e.what());
      inst.attr("code") = std::string(ErrorCodeName(e.code()));
      inst.attr("offset") = e.offset() ? py::object(py::int_(*e.offset())) : py::object(py::none());
      PyErr_SetObject(g_error_type, inst.ptr());
    }
  });

  BindSchema(m);
  BindWire(m);
  BindBuilder(m);
  BindRuntime(m);
  BindStats(m);
  BindBench(m);
}
