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

#include "matctl/target.h"

#include <algorithm>
#include <set>
#include <utility>

#include "matctl/error.h"

namespace matctl {

TargetState::TargetState(ProgramSchema schema,
                         std::chrono::nanoseconds response_delay)
    : schema_(std::move(schema)),
      schema_document_(SerializeSchema(schema_)),
      response_delay_(response_delay) {
  for (const auto& t : schema_.tables) {
    slot_index_.emplace(t.id, slots_.size());
    slots_.push_back(std::make_unique<Slot>(t));
  }
}

const TargetState::Slot& TargetState::SlotFor(std::uint32_t table_id) const {
  auto it = slot_index_.find(table_id);
  if (it == slot_index_.end()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "unknown table id " + std::to_string(table_id));
  }
  return *slots_[it->second];
}

WriteReport TargetState::ApplyWrite(const WriteBatch& batch) {
  return ApplyWrite(WriteBatch(batch));
}

WriteReport TargetState::ApplyWrite(WriteBatch&& batch) {
  std::set<std::size_t> touched;
  for (const auto& u : batch.updates) {
    auto it = slot_index_.find(u.table_id);
    if (it != slot_index_.end()) touched.insert(it->second);
  }
  std::vector<std::unique_lock<std::shared_mutex>> locks;
  locks.reserve(touched.size());
  for (std::size_t i : touched) locks.emplace_back(slots_[i]->mu);

  struct Journal {
    std::vector<TableStore::UndoRecord> undo;
    std::uint64_t next_seq = 0;
  };
  std::map<std::size_t, Journal> journals;
  if (batch.atomic) {
    for (std::size_t i : touched) journals[i].next_seq = slots_[i]->store.next_seq();
  }

  std::vector<OpStatus> per_op;
  per_op.reserve(batch.updates.size());
  bool failed = false;
  for (auto& u : batch.updates) {
    auto it = slot_index_.find(u.table_id);
    if (it == slot_index_.end()) {
      per_op.push_back({StatusCode::kSchemaMismatch,
                        "unknown table id " + std::to_string(u.table_id)});
      failed = true;
      continue;
    }
    auto* undo = batch.atomic ? &journals[it->second].undo : nullptr;
    per_op.push_back(slots_[it->second]->store.Apply(std::move(u), undo));
    failed = failed || !per_op.back().ok();
  }

  if (batch.atomic && failed) {
    for (auto& [i, journal] : journals) {
      slots_[i]->store.Rollback(journal.undo, journal.next_seq);
    }
    for (auto& s : per_op) {
      if (s.ok()) s.message = "rolled back";
    }
  }
  return MakeReport(batch.atomic, std::move(per_op));
}

std::vector<TableUpdate> TargetState::ReadEntries(
    std::uint32_t table_id, const std::optional<MatchKey>& key) const {
  const Slot& slot = SlotFor(table_id);
  std::optional<MatchKey> canonical;
  if (key.has_value()) canonical = CanonicalizeKey(*key, slot.store.schema());

  std::shared_lock lock(slot.mu);
  std::vector<TableUpdate> out;
  if (canonical.has_value()) {
    if (auto e = slot.store.Find(*canonical)) out.push_back(e->ToUpdate(table_id));
    return out;
  }
  const auto entries = slot.store.Entries();
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.ToUpdate(table_id));
  return out;
}

std::optional<StoredEntry> TargetState::Lookup(
    std::uint32_t table_id, std::span<const Bytes> packet) const {
  const Slot& slot = SlotFor(table_id);
  std::shared_lock lock(slot.mu);
  return slot.store.Lookup(packet);
}

std::optional<StoredEntry> TargetState::HandleTestPacket(
    std::uint32_t table_id, const std::vector<FieldValue>& fields) {
  const Slot& slot = SlotFor(table_id);
  const TableSchema& table = slot.store.schema();
  if (fields.size() != table.key_fields.size()) {
    throw Error(ErrorCode::kInvalidKey,
                "test packet for '" + table.name + "' needs " +
                    std::to_string(table.key_fields.size()) + " fields, got " +
                    std::to_string(fields.size()));
  }
  std::vector<Bytes> packet;
  std::vector<FieldValue> ordered;
  packet.reserve(fields.size());
  for (const FieldSpec& spec : table.key_fields) {
    auto it = std::find_if(fields.begin(), fields.end(), [&](const FieldValue& f) {
      return f.field_id == spec.id;
    });
    if (it == fields.end()) {
      throw Error(ErrorCode::kInvalidKey,
                  "test packet lacks field '" + spec.name + "'");
    }
    packet.push_back(it->value);
    ordered.push_back(*it);
  }

  auto result = Lookup(table_id, packet);
  if (result.has_value()) return result;

  std::vector<NotifySink> sinks;
  {
    std::lock_guard lock(subscribers_mu_);
    for (const auto& [id, sink] : subscribers_) sinks.push_back(sink);
  }
  const Notify notify{table_id, std::move(ordered), NotifyReason::kLookupMiss};
  for (const auto& sink : sinks) sink(notify);
  return std::nullopt;
}

std::uint64_t TargetState::Subscribe(NotifySink sink) {
  std::lock_guard lock(subscribers_mu_);
  const std::uint64_t id = next_subscriber_++;
  subscribers_.emplace(id, std::move(sink));
  return id;
}

void TargetState::Unsubscribe(std::uint64_t id) {
  std::lock_guard lock(subscribers_mu_);
  subscribers_.erase(id);
}

std::size_t TargetState::subscriber_count() const {
  std::lock_guard lock(subscribers_mu_);
  return subscribers_.size();
}

std::size_t TargetState::Occupancy(std::uint32_t table_id) const {
  const Slot& slot = SlotFor(table_id);
  std::shared_lock lock(slot.mu);
  return slot.store.size();
}

std::vector<TableSnapshot> TargetState::Snapshot() const {
  std::vector<TableSnapshot> out;
  for (const auto& slot : slots_) {
    std::shared_lock lock(slot->mu);
    out.push_back(slot->store.Snapshot());
  }
  return out;
}

}  // namespace matctl
