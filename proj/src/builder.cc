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

#include <arpa/inet.h>

#include <algorithm>

#include "matctl/error.h"

namespace matctl {

Value::Value(std::uint64_t v) : bytes_(BytesFromUint(v, 8)) {}

Value Value::FromBytes(Bytes bytes) {
  Value v;
  v.bytes_ = std::move(bytes);
  return v;
}

Value Value::Ipv4(std::string_view dotted) {
  in_addr addr{};
  const std::string text(dotted);
  if (::inet_pton(AF_INET, text.c_str(), &addr) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "not an IPv4 address: '" + text + "'");
  }
  const auto* raw = reinterpret_cast<const std::uint8_t*>(&addr.s_addr);
  return FromBytes(Bytes(raw, raw + 4));
}

KeyInput KeyInput::Lpm(Value v, std::uint16_t prefix_len) {
  KeyInput k(std::move(v));
  k.kind = MatchKind::kLpm;
  k.prefix_len = prefix_len;
  return k;
}

KeyInput KeyInput::Ternary(Value v, Value mask) {
  KeyInput k(std::move(v));
  k.kind = MatchKind::kTernary;
  k.mask = std::move(mask);
  return k;
}

namespace {

Bytes Fit(const Value& v, const FieldSpec& spec, std::string_view what) {
  auto fitted = ResizeToWidth(v.bytes(), spec.bit_width);
  if (!fitted.has_value()) {
    throw Error(ErrorCode::kValueOverflow,
                std::string(what) + " '" + spec.name + "': " + ToHex(v.bytes()) +
                    " exceeds " + std::to_string(spec.bit_width) + " bits");
  }
  return std::move(*fitted);
}

std::vector<ActionParam> BuildParams(const TableSchema& table,
                                     const ActionSpec& action,
                                     const ParamValues& params) {
  for (const auto& [name, value] : params) {
    if (action.FindParam(name) == nullptr) {
      throw Error(ErrorCode::kInvalidAction,
                  "action '" + action.name + "' of '" + table.name +
                      "' has no param '" + name + "'");
    }
  }
  std::vector<ActionParam> out;
  out.reserve(action.params.size());
  for (const FieldSpec& spec : action.params) {
    auto it = params.find(spec.name);
    if (it == params.end()) {
      throw Error(ErrorCode::kInvalidAction,
                  "action '" + action.name + "' needs param '" + spec.name + "'");
    }
    out.push_back(ActionParam{spec.id, Fit(it->second, spec, "param")});
  }
  return out;
}

TableUpdate BuildWithAction(UpdateOp op, const TableSchema& table,
                            const KeyValues& key, std::string_view action_name,
                            const ParamValues& params, std::uint32_t priority) {
  const ActionSpec* action = table.FindAction(action_name);
  if (action == nullptr) {
    throw Error(ErrorCode::kInvalidAction, "table '" + table.name +
                                               "' has no action '" +
                                               std::string(action_name) + "'");
  }
  TableUpdate u;
  u.op = op;
  u.table_id = table.id;
  u.key = BuildKey(table, key, priority);
  u.action_id = action->id;
  u.params = BuildParams(table, *action, params);
  return u;
}

}  // namespace

MatchKey BuildKey(const TableSchema& table, const KeyValues& key,
                  std::uint32_t priority) {
  for (const auto& [name, input] : key) {
    if (table.FindKeyField(name) == nullptr) {
      throw Error(ErrorCode::kInvalidKey,
                  "table '" + table.name + "' has no key field '" + name + "'");
    }
  }
  MatchKey out;
  for (const FieldSpec& spec : table.key_fields) {
    auto it = key.find(spec.name);
    if (it == key.end()) {
      throw Error(ErrorCode::kInvalidKey, "missing key field '" + spec.name + "'");
    }
    const KeyInput& in = it->second;
    if (in.kind != spec.match_kind) {
      throw Error(ErrorCode::kInvalidKey,
                  "key field '" + spec.name + "' is " +
                      std::string(MatchKindName(*spec.match_kind)) + ", got " +
                      std::string(MatchKindName(in.kind)) + " input");
    }
    MatchValue m;
    m.kind = in.kind;
    m.value = Fit(in.value, spec, "key field");
    if (in.kind == MatchKind::kLpm) {
      if (in.prefix_len > spec.bit_width) {
        throw Error(ErrorCode::kInvalidKey,
                    "prefix_len " + std::to_string(in.prefix_len) +
                        " exceeds field '" + spec.name + "'");
      }
      m.prefix_len = in.prefix_len;
    } else if (in.kind == MatchKind::kTernary) {
      m.mask = Fit(in.mask, spec, "mask of key field");
    }
    out.fields.push_back(FieldMatch{spec.id, std::move(m)});
  }
  out.priority = priority;
  return CanonicalizeKey(out, table);
}

TableUpdate BuildInsert(const TableSchema& table, const KeyValues& key,
                        std::string_view action, const ParamValues& params,
                        std::uint32_t priority) {
  return BuildWithAction(UpdateOp::kInsert, table, key, action, params, priority);
}

TableUpdate BuildModify(const TableSchema& table, const KeyValues& key,
                        std::string_view action, const ParamValues& params,
                        std::uint32_t priority) {
  return BuildWithAction(UpdateOp::kModify, table, key, action, params, priority);
}

TableUpdate BuildDelete(const TableSchema& table, const KeyValues& key,
                        std::uint32_t priority) {
  TableUpdate u;
  u.op = UpdateOp::kDelete;
  u.table_id = table.id;
  u.key = BuildKey(table, key, priority);
  return u;
}

std::vector<FieldValue> BuildPacket(const TableSchema& table,
                                    const PacketValues& fields) {
  for (const auto& [name, value] : fields) {
    if (table.FindKeyField(name) == nullptr) {
      throw Error(ErrorCode::kInvalidKey,
                  "table '" + table.name + "' has no key field '" + name + "'");
    }
  }
  std::vector<FieldValue> out;
  for (const FieldSpec& spec : table.key_fields) {
    auto it = fields.find(spec.name);
    if (it == fields.end()) {
      throw Error(ErrorCode::kInvalidKey, "missing packet field '" + spec.name + "'");
    }
    out.push_back(FieldValue{spec.id, Fit(it->second, spec, "packet field")});
  }
  return out;
}

}  // namespace matctl
