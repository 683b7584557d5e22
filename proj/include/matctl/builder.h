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

#ifndef MATCTL_BUILDER_H_
#define MATCTL_BUILDER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "matctl/bytes.h"
#include "matctl/schema.h"
#include "matctl/wire.h"

namespace matctl {

// Unsigned integer input for key fields and action params, held as minimal
// big-endian bytes until it is fitted to a schema width.
class Value {
 public:
  Value(std::uint64_t v);  // NOLINT(google-explicit-constructor)
  static Value FromBytes(Bytes bytes);
  // Dotted-quad IPv4 address. Throws Error(kInvalidArgument).
  static Value Ipv4(std::string_view dotted);

  const Bytes& bytes() const { return bytes_; }

 private:
  Value() = default;
  Bytes bytes_;
};

struct KeyInput {
  KeyInput(Value v) : value(std::move(v)) {}           // NOLINT
  KeyInput(std::uint64_t v) : value(v) {}              // NOLINT

  static KeyInput Exact(Value v) { return KeyInput(std::move(v)); }
  static KeyInput Lpm(Value v, std::uint16_t prefix_len);
  static KeyInput Ternary(Value v, Value mask);

  MatchKind kind = MatchKind::kExact;
  Value value;
  std::uint16_t prefix_len = 0;
  Value mask = Value(0);
};

using KeyValues = std::map<std::string, KeyInput, std::less<>>;
using ParamValues = std::map<std::string, Value, std::less<>>;
using PacketValues = std::map<std::string, Value, std::less<>>;

// Canonical key for table from values keyed by field name. Throws
// Error(kInvalidKey) for unknown, missing or mis-kinded fields and
// Error(kValueOverflow) when a value or mask exceeds its field's bit width.
MatchKey BuildKey(const TableSchema& table, const KeyValues& key,
                  std::uint32_t priority = 0);

TableUpdate BuildInsert(const TableSchema& table, const KeyValues& key,
                        std::string_view action, const ParamValues& params = {},
                        std::uint32_t priority = 0);
TableUpdate BuildModify(const TableSchema& table, const KeyValues& key,
                        std::string_view action, const ParamValues& params = {},
                        std::uint32_t priority = 0);
TableUpdate BuildDelete(const TableSchema& table, const KeyValues& key,
                        std::uint32_t priority = 0);

// Packet field values in key order for a test-packet lookup.
std::vector<FieldValue> BuildPacket(const TableSchema& table,
                                    const PacketValues& fields);

}  // namespace matctl

#endif  // MATCTL_BUILDER_H_
