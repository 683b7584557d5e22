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

#ifndef MATCTL_TARGET_H_
#define MATCTL_TARGET_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "matctl/schema.h"
#include "matctl/table_store.h"
#include "matctl/wire.h"

namespace matctl {

using NotifySink = std::function<void(const Notify&)>;

// The simulated switch: one TableStore per schema table plus the set of
// notification subscribers.
//
// Thread-safe. Mutations of a table are serialized by a per-table lock; a
// batch locks every table it touches (in table order) for its whole
// duration, so each batch is applied as one linearizable step per table.
class TargetState {
 public:
  explicit TargetState(ProgramSchema schema,
                       std::chrono::nanoseconds response_delay = {});

  TargetState(const TargetState&) = delete;
  TargetState& operator=(const TargetState&) = delete;

  const ProgramSchema& schema() const { return schema_; }
  // Canonical schema document served to clients.
  const std::string& schema_document() const { return schema_document_; }

  std::chrono::nanoseconds response_delay() const { return response_delay_; }

  // Non-atomic batches apply in order and skip failed updates. Atomic
  // batches are all-or-nothing: on any failure every table they touched is
  // restored to its pre-batch state and the report is FAILED; updates that
  // would have succeeded keep status OK with message "rolled back".
  WriteReport ApplyWrite(const WriteBatch& batch);
  WriteReport ApplyWrite(WriteBatch&& batch);

  // All entries by insertion order, or the single entry matching key.
  // Throws Error(kSchemaMismatch) for unknown tables, Error(kInvalidKey) for
  // a key that cannot be canonicalized.
  std::vector<TableUpdate> ReadEntries(std::uint32_t table_id,
                                       const std::optional<MatchKey>& key) const;

  std::optional<StoredEntry> Lookup(std::uint32_t table_id,
                                    std::span<const Bytes> packet) const;

  // Looks the packet up; on a miss every subscriber receives exactly one
  // Notify carrying the packet's field values in key order. Field values may
  // be given in any order but must name each key field once.
  std::optional<StoredEntry> HandleTestPacket(
      std::uint32_t table_id, const std::vector<FieldValue>& fields);

  std::uint64_t Subscribe(NotifySink sink);
  void Unsubscribe(std::uint64_t id);
  std::size_t subscriber_count() const;

  std::size_t Occupancy(std::uint32_t table_id) const;

  std::vector<TableSnapshot> Snapshot() const;

 private:
  struct Slot {
    explicit Slot(TableSchema schema) : store(std::move(schema)) {}
    TableStore store;
    mutable std::shared_mutex mu;
  };

  const Slot& SlotFor(std::uint32_t table_id) const;

  ProgramSchema schema_;
  std::string schema_document_;
  std::chrono::nanoseconds response_delay_;
  std::vector<std::unique_ptr<Slot>> slots_;
  std::unordered_map<std::uint32_t, std::size_t> slot_index_;

  mutable std::mutex subscribers_mu_;
  std::uint64_t next_subscriber_ = 1;
  std::map<std::uint64_t, NotifySink> subscribers_;
};

}  // namespace matctl

#endif  // MATCTL_TARGET_H_
