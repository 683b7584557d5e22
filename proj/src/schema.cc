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

#include <algorithm>
#include <fstream>
#include <sstream>
#include <initializer_list>
#include <set>
#include <utility>

#include "json.hpp"
#include "matctl/error.h"

namespace matctl {

using nlohmann::json;

std::string_view MatchKindName(MatchKind kind) {
  switch (kind) {
    case MatchKind::kExact: return "exact";
    case MatchKind::kLpm: return "lpm";
    case MatchKind::kTernary: return "ternary";
  }
  return "?";
}

std::string_view TableKindName(TableKind kind) {
  switch (kind) {
    case TableKind::kMatchAction: return "match_action";
    case TableKind::kRegister: return "register";
    case TableKind::kPort: return "port";
  }
  return "?";
}

const FieldSpec* ActionSpec::FindParam(std::string_view param_name) const {
  for (const auto& p : params) {
    if (p.name == param_name) return &p;
  }
  return nullptr;
}

const ActionSpec* TableSchema::FindAction(std::uint32_t action_id) const {
  for (const auto& a : actions) {
    if (a.id == action_id) return &a;
  }
  return nullptr;
}

const ActionSpec* TableSchema::FindAction(std::string_view action_name) const {
  for (const auto& a : actions) {
    if (a.name == action_name) return &a;
  }
  return nullptr;
}

const FieldSpec* TableSchema::FindKeyField(std::string_view field_name) const {
  for (const auto& f : key_fields) {
    if (f.name == field_name) return &f;
  }
  return nullptr;
}

bool TableSchema::HasMatchKind(MatchKind kind) const {
  return std::any_of(key_fields.begin(), key_fields.end(),
                     [kind](const FieldSpec& f) { return f.match_kind == kind; });
}

const TableSchema* ProgramSchema::FindTable(std::uint32_t table_id) const {
  for (const auto& t : tables) {
    if (t.id == table_id) return &t;
  }
  return nullptr;
}

const TableSchema* ProgramSchema::FindTable(std::string_view table_name) const {
  for (const auto& t : tables) {
    if (t.name == table_name) return &t;
  }
  return nullptr;
}

namespace {

[[noreturn]] void Malformed(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kMalformedSchema, path + ": " + what);
}

[[noreturn]] void Invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kInvalidSchema, path + ": " + what);
}

std::string Join(const std::string& path, std::string_view member) {
  if (path.empty()) return std::string(member);
  return path + "." + std::string(member);
}

std::string Index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

// Object with exactly the listed members.
void ExpectObject(const json& node, const std::string& path,
                  std::initializer_list<std::string_view> members) {
  if (!node.is_object()) Malformed(path.empty() ? "$" : path, "expected object");
  for (const auto& [key, value] : node.items()) {
    if (std::find(members.begin(), members.end(), key) == members.end()) {
      Malformed(Join(path, key), "unknown key");
    }
  }
  for (std::string_view m : members) {
    if (!node.contains(m)) Malformed(Join(path, m), "missing required key");
  }
}

const json& ArrayAt(const json& node, const std::string& path,
                    std::string_view member) {
  const json& a = node.at(std::string(member));
  if (!a.is_array()) Malformed(Join(path, member), "expected array");
  return a;
}

std::string StringAt(const json& node, const std::string& path,
                     std::string_view member) {
  const json& s = node.at(std::string(member));
  if (!s.is_string()) Malformed(Join(path, member), "expected string");
  return s.get<std::string>();
}

std::uint64_t PositiveAt(const json& node, const std::string& path,
                         std::string_view member, std::uint64_t max) {
  const json& n = node.at(std::string(member));
  const std::string where = Join(path, member);
  if (!n.is_number_integer()) Malformed(where, "expected integer");
  if (!n.is_number_unsigned() || n.get<std::uint64_t>() == 0) {
    Invalid(where, "must be a positive integer");
  }
  const auto v = n.get<std::uint64_t>();
  if (v > max) Invalid(where, "value " + std::to_string(v) + " out of range");
  return v;
}

FieldSpec ParseField(const json& node, const std::string& path, bool is_key) {
  if (is_key) {
    ExpectObject(node, path, {"id", "name", "bits", "match"});
  } else {
    ExpectObject(node, path, {"id", "name", "bits"});
  }
  FieldSpec f;
  f.id = static_cast<std::uint32_t>(PositiveAt(node, path, "id", UINT32_MAX));
  f.name = StringAt(node, path, "name");
  if (f.name.empty()) Invalid(Join(path, "name"), "must not be empty");
  f.bit_width = static_cast<std::uint32_t>(
      PositiveAt(node, path, "bits", UINT32_MAX));
  if (f.bit_width > kMaxBitWidth) {
    Invalid(Join(path, "bits"), "bit width " + std::to_string(f.bit_width) +
                                    " exceeds " + std::to_string(kMaxBitWidth));
  }
  if (is_key) {
    const std::string kind = StringAt(node, path, "match");
    if (kind == "exact") {
      f.match_kind = MatchKind::kExact;
    } else if (kind == "lpm") {
      f.match_kind = MatchKind::kLpm;
    } else if (kind == "ternary") {
      f.match_kind = MatchKind::kTernary;
    } else {
      Invalid(Join(path, "match"), "unknown match kind '" + kind + "'");
    }
  }
  return f;
}

// Field ids and names must be unique within one list.
void CheckUnique(const std::vector<FieldSpec>& fields, const std::string& path,
                 std::string_view list) {
  std::set<std::uint32_t> ids;
  std::set<std::string> names;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string where = Index(Join(path, list), i);
    if (!ids.insert(fields[i].id).second) {
      Invalid(Join(where, "id"),
              "duplicate id " + std::to_string(fields[i].id));
    }
    if (!names.insert(fields[i].name).second) {
      Invalid(Join(where, "name"), "duplicate name '" + fields[i].name + "'");
    }
  }
}

TableSchema ParseTable(const json& node, const std::string& path) {
  ExpectObject(node, path, {"id", "name", "kind", "capacity", "key", "actions"});
  TableSchema t;
  t.id = static_cast<std::uint32_t>(PositiveAt(node, path, "id", UINT32_MAX));
  t.name = StringAt(node, path, "name");
  if (t.name.empty()) Invalid(Join(path, "name"), "must not be empty");
  const std::string kind = StringAt(node, path, "kind");
  if (kind == "match_action") {
    t.kind = TableKind::kMatchAction;
  } else if (kind == "register") {
    t.kind = TableKind::kRegister;
  } else if (kind == "port") {
    t.kind = TableKind::kPort;
  } else {
    Invalid(Join(path, "kind"), "unknown table kind '" + kind + "'");
  }
  t.capacity = PositiveAt(node, path, "capacity", UINT64_MAX);

  const json& key = ArrayAt(node, path, "key");
  for (std::size_t i = 0; i < key.size(); ++i) {
    t.key_fields.push_back(ParseField(key[i], Index(Join(path, "key"), i), true));
  }
  CheckUnique(t.key_fields, path, "key");

  const json& actions = ArrayAt(node, path, "actions");
  std::set<std::uint32_t> action_ids;
  std::set<std::string> action_names;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const std::string where = Index(Join(path, "actions"), i);
    ExpectObject(actions[i], where, {"id", "name", "params"});
    ActionSpec a;
    a.id = static_cast<std::uint32_t>(
        PositiveAt(actions[i], where, "id", UINT32_MAX));
    a.name = StringAt(actions[i], where, "name");
    if (a.name.empty()) Invalid(Join(where, "name"), "must not be empty");
    const json& params = ArrayAt(actions[i], where, "params");
    for (std::size_t j = 0; j < params.size(); ++j) {
      a.params.push_back(
          ParseField(params[j], Index(Join(where, "params"), j), false));
    }
    CheckUnique(a.params, where, "params");
    if (!action_ids.insert(a.id).second) {
      Invalid(Join(where, "id"), "duplicate action id " + std::to_string(a.id));
    }
    if (!action_names.insert(a.name).second) {
      Invalid(Join(where, "name"), "duplicate action name '" + a.name + "'");
    }
    t.actions.push_back(std::move(a));
  }

  switch (t.kind) {
    case TableKind::kMatchAction:
      break;
    case TableKind::kRegister:
      if (t.key_fields.size() != 1 ||
          t.key_fields[0].match_kind != MatchKind::kExact) {
        Invalid(Join(path, "key"),
                "register table needs exactly one exact key field (index)");
      }
      if (t.actions.size() != 1 || t.actions[0].params.size() != 1) {
        Invalid(Join(path, "actions"),
                "register table needs exactly one single-param action");
      }
      break;
    case TableKind::kPort:
      if (t.key_fields.size() != 1 ||
          t.key_fields[0].match_kind != MatchKind::kExact) {
        Invalid(Join(path, "key"),
                "port table needs exactly one exact key field (port number)");
      }
      break;
  }
  return t;
}

json FieldToJson(const FieldSpec& f) {
  json j = {{"id", f.id}, {"name", f.name}, {"bits", f.bit_width}};
  if (f.match_kind.has_value()) {
    j["match"] = std::string(MatchKindName(*f.match_kind));
  }
  return j;
}

}  // namespace

ProgramSchema ParseSchema(std::string_view document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    Malformed("$", "JSON syntax error at byte " + std::to_string(e.byte));
  }
  ExpectObject(root, "", {"program", "tables"});

  ProgramSchema schema;
  schema.program_name = StringAt(root, "", "program");
  const json& tables = ArrayAt(root, "", "tables");
  std::set<std::uint32_t> ids;
  std::set<std::string> names;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const std::string path = Index("tables", i);
    TableSchema t = ParseTable(tables[i], path);
    if (!ids.insert(t.id).second) {
      Invalid(Join(path, "id"), "duplicate table id " + std::to_string(t.id));
    }
    if (!names.insert(t.name).second) {
      Invalid(Join(path, "name"), "duplicate table name '" + t.name + "'");
    }
    schema.tables.push_back(std::move(t));
  }
  schema.schema_digest = ComputeDigest(schema);
  return schema;
}

std::string SerializeSchema(const ProgramSchema& schema) {
  json tables = json::array();
  for (const auto& t : schema.tables) {
    json key = json::array();
    for (const auto& f : t.key_fields) key.push_back(FieldToJson(f));
    json actions = json::array();
    for (const auto& a : t.actions) {
      json params = json::array();
      for (const auto& p : a.params) params.push_back(FieldToJson(p));
      actions.push_back({{"id", a.id}, {"name", a.name}, {"params", params}});
    }
    tables.push_back({{"id", t.id},
                      {"name", t.name},
                      {"kind", std::string(TableKindName(t.kind))},
                      {"capacity", t.capacity},
                      {"key", key},
                      {"actions", actions}});
  }
  json root = {{"program", schema.program_name}, {"tables", tables}};
  return root.dump();
}

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t ComputeDigest(const ProgramSchema& schema) {
  return Fnv1a64(SerializeSchema(schema));
}

const TableSchema& TableByName(const ProgramSchema& schema,
                               std::string_view name) {
  const TableSchema* t = schema.FindTable(name);
  if (t == nullptr) {
    throw Error(ErrorCode::kNotFound, "no table named '" + std::string(name) + "'");
  }
  return *t;
}

ProgramSchema LoadSchemaFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot read schema file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseSchema(text.str());
}

}  // namespace matctl
