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

#ifndef MATCTL_TABLE_STORE_H_
#define MATCTL_TABLE_STORE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "matctl/schema.h"
#include "matctl/wire.h"

namespace matctl {

struct StoredEntry {
  MatchKey key;  // canonical
  std::uint32_t action_id = 0;
  std::vector<ActionParam> params;
  std::uint64_t insertion_seq = 0;

  TableUpdate ToUpdate(std::uint32_t table_id) const;
  bool operator==(const StoredEntry&) const = default;
};

struct TableSnapshot {
  std::uint32_t table_id = 0;
  std::vector<StoredEntry> entries;  // by insertion_seq
  std::uint64_t next_seq = 0;

  bool operator==(const TableSnapshot&) const = default;
};

// Entry store of one table with match-kind aware lookup. Not synchronized;
// TargetState serializes access.
//
// Lookup strategy:
//  - exact-only tables probe the entry hash map directly.
//  - tables with LPM but no ternary fields keep one hash index per distinct
//    tuple of prefix lengths. Groups are probed in decreasing total prefix
//    length and probing stops once no remaining group can beat the best hit.
//  - tables with a ternary field keep entries ordered by (priority desc,
//    insertion_seq asc); the first covering entry wins.
class TableStore {
 public:
  // State of one key before a mutation, for rollback.
  struct UndoRecord {
    std::string key_bytes;
    std::optional<StoredEntry> previous;
  };

  explicit TableStore(TableSchema schema);

  TableStore(const TableStore&) = delete;
  TableStore& operator=(const TableStore&) = delete;

  const TableSchema& schema() const { return schema_; }
  std::size_t size() const { return entries_.size(); }
  std::uint64_t next_seq() const { return next_seq_; }

  // Validates and applies one update. When undo is non-null, a record is
  // appended for every mutation so Rollback can restore the prior state.
  OpStatus Apply(TableUpdate update, std::vector<UndoRecord>* undo);

  // Reverts the records in reverse order and resets the sequence counter.
  void Rollback(std::vector<UndoRecord>& undo, std::uint64_t next_seq);

  // key must already be canonical.
  std::optional<StoredEntry> Find(const MatchKey& key) const;

  std::vector<StoredEntry> Entries() const;

  // One value per key field in schema order, each exactly the field's byte
  // width. Throws Error(kInvalidKey) on width mismatch.
  std::optional<StoredEntry> Lookup(std::span<const Bytes> packet) const;

  TableSnapshot Snapshot() const;

 private:
  struct PrefixGroup {
    std::vector<std::uint16_t> prefix_lens;  // one per LPM field
    unsigned total = 0;
    std::unordered_map<std::string, const StoredEntry*> by_value;
  };
  using TernaryOrder = std::pair<std::uint32_t, std::uint64_t>;

  std::string KeyBytes(const MatchKey& key) const;
  void Put(std::string key_bytes, StoredEntry entry);
  void Erase(const std::string& key_bytes);
  void Index(const StoredEntry& entry);
  void Unindex(const StoredEntry& entry);
  void SortGroups();
  bool Covers(const StoredEntry& entry, std::span<const Bytes> packet) const;

  TableSchema schema_;
  bool ternary_ = false;
  bool exact_only_ = false;
  std::vector<std::size_t> lpm_fields_;
  std::uint64_t next_seq_ = 1;
  std::unordered_map<std::string, StoredEntry> entries_;
  std::map<std::vector<std::uint16_t>, PrefixGroup> groups_;
  std::vector<const PrefixGroup*> group_order_;
  std::map<TernaryOrder, const StoredEntry*> ternary_order_;
};

}  // namespace matctl

#endif  // MATCTL_TABLE_STORE_H_
