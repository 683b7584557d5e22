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

#ifndef MATCTL_SCHEMA_H_
#define MATCTL_SCHEMA_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace matctl {

inline constexpr std::uint32_t kMaxBitWidth = 128;

enum class MatchKind : std::uint8_t { kExact = 0, kLpm = 1, kTernary = 2 };

enum class TableKind { kMatchAction, kRegister, kPort };

std::string_view MatchKindName(MatchKind kind);
std::string_view TableKindName(TableKind kind);

// A key field or an action parameter. Action parameters leave match_kind
// unset.
struct FieldSpec {
  std::uint32_t id = 0;
  std::string name;
  std::uint32_t bit_width = 0;
  std::optional<MatchKind> match_kind;

  // Number of bytes a value of this field occupies on the wire.
  std::size_t byte_width() const { return (bit_width + 7) / 8; }

  bool operator==(const FieldSpec&) const = default;
};

struct ActionSpec {
  std::uint32_t id = 0;
  std::string name;
  std::vector<FieldSpec> params;

  const FieldSpec* FindParam(std::string_view param_name) const;

  bool operator==(const ActionSpec&) const = default;
};

struct TableSchema {
  std::uint32_t id = 0;
  std::string name;
  TableKind kind = TableKind::kMatchAction;
  std::uint64_t capacity = 0;
  std::vector<FieldSpec> key_fields;
  std::vector<ActionSpec> actions;

  const ActionSpec* FindAction(std::uint32_t action_id) const;
  const ActionSpec* FindAction(std::string_view action_name) const;
  const FieldSpec* FindKeyField(std::string_view field_name) const;

  bool HasMatchKind(MatchKind kind) const;

  bool operator==(const TableSchema&) const = default;
};

struct ProgramSchema {
  std::string program_name;
  std::vector<TableSchema> tables;
  std::uint64_t schema_digest = 0;

  const TableSchema* FindTable(std::uint32_t table_id) const;
  const TableSchema* FindTable(std::string_view table_name) const;

  bool operator==(const ProgramSchema&) const = default;
};

// Parses and validates a schema document. Throws Error with
// kMalformedSchema for syntax or structural problems and kInvalidSchema for
// semantic violations; the message names the offending element path, e.g.
// "tables[0].key[1].bits".
ProgramSchema ParseSchema(std::string_view document);

// Reads and parses a schema file. Throws Error(kNotFound) if it cannot be
// read.
ProgramSchema LoadSchemaFile(const std::string& path);

// Canonical compact JSON form: object keys sorted, no whitespace, tables and
// fields in declaration order. ParseSchema(SerializeSchema(s)) == s.
std::string SerializeSchema(const ProgramSchema& schema);

// 64-bit FNV-1a over SerializeSchema(schema). Ignores schema.schema_digest.
std::uint64_t ComputeDigest(const ProgramSchema& schema);

std::uint64_t Fnv1a64(std::string_view bytes);

// Throws Error(kNotFound) when no table has that name.
const TableSchema& TableByName(const ProgramSchema& schema,
                               std::string_view name);

}  // namespace matctl

#endif  // MATCTL_SCHEMA_H_
