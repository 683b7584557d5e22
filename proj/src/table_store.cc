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

#include "matctl/table_store.h"

#include <algorithm>
#include <limits>

#include "matctl/error.h"

namespace matctl {

TableUpdate StoredEntry::ToUpdate(std::uint32_t table_id) const {
  return TableUpdate{UpdateOp::kInsert, table_id, key, action_id, params};
}

namespace {

void AppendBytes(std::string& out, const Bytes& v) {
  out.append(reinterpret_cast<const char*>(v.data()), v.size());
}

std::uint64_t ToUint64(const Bytes& v) {
  std::uint64_t out = 0;
  for (std::uint8_t b : v) out = (out << 8) | b;
  return out;
}

}  // namespace

TableStore::TableStore(TableSchema schema) : schema_(std::move(schema)) {
  ternary_ = schema_.HasMatchKind(MatchKind::kTernary);
  for (std::size_t i = 0; i < schema_.key_fields.size(); ++i) {
    if (schema_.key_fields[i].match_kind == MatchKind::kLpm) lpm_fields_.push_back(i);
  }
  exact_only_ = !ternary_ && lpm_fields_.empty();
  entries_.reserve(static_cast<std::size_t>(
      std::min<std::uint64_t>(schema_.capacity, std::uint64_t{1} << 20)));
}

std::string TableStore::KeyBytes(const MatchKey& key) const {
  std::string out;
  for (const auto& f : key.fields) {
    AppendBytes(out, f.match.value);
    if (f.match.kind == MatchKind::kLpm) {
      out += static_cast<char>(f.match.prefix_len >> 8);
      out += static_cast<char>(f.match.prefix_len & 0xFF);
    } else if (f.match.kind == MatchKind::kTernary) {
      AppendBytes(out, f.match.mask);
    }
  }
  if (ternary_) {
    for (int s = 24; s >= 0; s -= 8) out += static_cast<char>(key.priority >> s);
  }
  return out;
}

OpStatus TableStore::Apply(TableUpdate update, std::vector<UndoRecord>* undo) {
  MatchKey& key = update.key;
  try {
    CanonicalizeKeyInPlace(key, schema_);
  } catch (const Error& e) {
    return {StatusCode::kInvalidKey, e.what()};
  }
  if (schema_.kind == TableKind::kRegister) {
    const Bytes& index = key.fields[0].match.value;
    if (SignificantBits(index) > 64 || ToUint64(index) >= schema_.capacity) {
      return {StatusCode::kInvalidKey,
              "register index " + ToHex(index) + " out of range for '" +
                  schema_.name + "'"};
    }
  }

  std::vector<ActionParam> params;
  if (update.op == UpdateOp::kDelete) {
    if (update.action_id != 0 || !update.params.empty()) {
      return {StatusCode::kInvalidAction, "DELETE carries action data"};
    }
  } else {
    const ActionSpec* action = schema_.FindAction(update.action_id);
    if (action == nullptr) {
      return {StatusCode::kInvalidAction,
              "unknown action id " + std::to_string(update.action_id) +
                  " in table '" + schema_.name + "'"};
    }
    if (update.params.size() != action->params.size()) {
      return {StatusCode::kInvalidAction,
              "action '" + action->name + "' takes " +
                  std::to_string(action->params.size()) + " params, got " +
                  std::to_string(update.params.size())};
    }
    for (std::size_t i = 0; i < action->params.size(); ++i) {
      const FieldSpec& spec = action->params[i];
      ActionParam& given = update.params[i];
      if (given.param_id != spec.id) {
        return {StatusCode::kInvalidAction,
                "action '" + action->name + "' param " + std::to_string(i) +
                    " must be id " + std::to_string(spec.id)};
      }
      if (FitsWidth(given.value, spec.bit_width)) continue;
      auto value = ResizeToWidth(given.value, spec.bit_width);
      if (!value.has_value()) {
        return {StatusCode::kInvalidAction,
                "param '" + spec.name + "' value " + ToHex(given.value) +
                    " exceeds " + std::to_string(spec.bit_width) + " bits"};
      }
      given.value = std::move(*value);
    }
    params = std::move(update.params);
  }

  std::string key_bytes = KeyBytes(key);
  auto it = entries_.find(key_bytes);
  switch (update.op) {
    case UpdateOp::kInsert: {
      if (it != entries_.end()) {
        return {StatusCode::kAlreadyExists, "entry already exists"};
      }
      if (entries_.size() >= schema_.capacity) {
        return {StatusCode::kTableFull,
                "table '" + schema_.name + "' is full (capacity " +
                    std::to_string(schema_.capacity) + ")"};
      }
      if (undo != nullptr) undo->push_back({key_bytes, std::nullopt});
      Put(std::move(key_bytes),
          StoredEntry{std::move(key), update.action_id, std::move(params),
                      next_seq_++});
      return {};
    }
    case UpdateOp::kModify: {
      if (it == entries_.end()) return {StatusCode::kNotFound, "no such entry"};
      if (undo != nullptr) undo->push_back({key_bytes, it->second});
      // Key and insertion_seq stay put, so the lookup indexes are unaffected.
      it->second.action_id = update.action_id;
      it->second.params = std::move(params);
      return {};
    }
    case UpdateOp::kDelete: {
      if (it == entries_.end()) return {StatusCode::kNotFound, "no such entry"};
      if (undo != nullptr) undo->push_back({key_bytes, it->second});
      Erase(key_bytes);
      return {};
    }
  }
  return {StatusCode::kMalformed, "unknown update op"};
}

void TableStore::Rollback(std::vector<UndoRecord>& undo,
                          std::uint64_t next_seq) {
  for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
    Erase(it->key_bytes);
    if (it->previous.has_value()) Put(it->key_bytes, std::move(*it->previous));
  }
  undo.clear();
  next_seq_ = next_seq;
}

void TableStore::Put(std::string key_bytes, StoredEntry entry) {
  auto [it, inserted] = entries_.emplace(std::move(key_bytes), std::move(entry));
  Index(it->second);
}

void TableStore::Erase(const std::string& key_bytes) {
  auto it = entries_.find(key_bytes);
  if (it == entries_.end()) return;
  Unindex(it->second);
  entries_.erase(it);
}

namespace {

std::string ValueBytes(const MatchKey& key) {
  std::string out;
  for (const auto& f : key.fields) AppendBytes(out, f.match.value);
  return out;
}

}  // namespace

void TableStore::Index(const StoredEntry& entry) {
  if (exact_only_) return;
  if (ternary_) {
    ternary_order_.emplace(
        TernaryOrder{std::numeric_limits<std::uint32_t>::max() - entry.key.priority,
                     entry.insertion_seq},
        &entry);
    return;
  }
  std::vector<std::uint16_t> prefixes;
  prefixes.reserve(lpm_fields_.size());
  for (std::size_t i : lpm_fields_) prefixes.push_back(entry.key.fields[i].match.prefix_len);
  auto [it, created] = groups_.try_emplace(prefixes);
  PrefixGroup& group = it->second;
  if (created) {
    group.prefix_lens = std::move(prefixes);
    for (std::uint16_t p : group.prefix_lens) group.total += p;
    SortGroups();
  }
  group.by_value.emplace(ValueBytes(entry.key), &entry);
}

void TableStore::Unindex(const StoredEntry& entry) {
  if (exact_only_) return;
  if (ternary_) {
    ternary_order_.erase(TernaryOrder{
        std::numeric_limits<std::uint32_t>::max() - entry.key.priority,
        entry.insertion_seq});
    return;
  }
  std::vector<std::uint16_t> prefixes;
  for (std::size_t i : lpm_fields_) prefixes.push_back(entry.key.fields[i].match.prefix_len);
  auto it = groups_.find(prefixes);
  if (it == groups_.end()) return;
  it->second.by_value.erase(ValueBytes(entry.key));
  if (it->second.by_value.empty()) {
    groups_.erase(it);
    SortGroups();
  }
}

void TableStore::SortGroups() {
  group_order_.clear();
  for (const auto& [prefixes, group] : groups_) group_order_.push_back(&group);
  std::stable_sort(group_order_.begin(), group_order_.end(),
                   [](const PrefixGroup* a, const PrefixGroup* b) {
                     return a->total > b->total;
                   });
}

std::optional<StoredEntry> TableStore::Find(const MatchKey& key) const {
  auto it = entries_.find(KeyBytes(key));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<StoredEntry> TableStore::Entries() const {
  std::vector<const StoredEntry*> ordered;
  ordered.reserve(entries_.size());
  for (const auto& [bytes, entry] : entries_) ordered.push_back(&entry);
  std::sort(ordered.begin(), ordered.end(), [](const StoredEntry* a, const StoredEntry* b) {
    return a->insertion_seq < b->insertion_seq;
  });
  std::vector<StoredEntry> out;
  out.reserve(ordered.size());
  for (const StoredEntry* e : ordered) out.push_back(*e);
  return out;
}

TableSnapshot TableStore::Snapshot() const {
  return TableSnapshot{schema_.id, Entries(), next_seq_};
}

bool TableStore::Covers(const StoredEntry& entry,
                        std::span<const Bytes> packet) const {
  for (std::size_t i = 0; i < packet.size(); ++i) {
    const MatchValue& m = entry.key.fields[i].match;
    const Bytes& p = packet[i];
    switch (m.kind) {
      case MatchKind::kExact:
        if (p != m.value) return false;
        break;
      case MatchKind::kLpm: {
        Bytes masked = p;
        ClearLowBits(masked, schema_.key_fields[i].bit_width - m.prefix_len);
        if (masked != m.value) return false;
        break;
      }
      case MatchKind::kTernary:
        for (std::size_t b = 0; b < p.size(); ++b) {
          if ((p[b] & m.mask[b]) != m.value[b]) return false;
        }
        break;
    }
  }
  return true;
}

std::optional<StoredEntry> TableStore::Lookup(
    std::span<const Bytes> packet) const {
  if (packet.size() != schema_.key_fields.size()) {
    throw Error(ErrorCode::kInvalidKey,
                "table '" + schema_.name + "' expects " +
                    std::to_string(schema_.key_fields.size()) +
                    " packet fields, got " + std::to_string(packet.size()));
  }
  for (std::size_t i = 0; i < packet.size(); ++i) {
    const FieldSpec& f = schema_.key_fields[i];
    if (!FitsWidth(packet[i], f.bit_width)) {
      throw Error(ErrorCode::kInvalidKey,
                  "packet value " + ToHex(packet[i]) + " is not a " +
                      std::to_string(f.bit_width) + "-bit value for '" +
                      f.name + "'");
    }
  }

  if (exact_only_) {
    std::string probe;
    for (const Bytes& v : packet) AppendBytes(probe, v);
    auto it = entries_.find(probe);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  if (ternary_) {
    for (const auto& [order, entry] : ternary_order_) {
      if (Covers(*entry, packet)) return *entry;
    }
    return std::nullopt;
  }

  const StoredEntry* best = nullptr;
  unsigned best_total = 0;
  std::string probe;
  for (const PrefixGroup* group : group_order_) {
    if (best != nullptr && group->total < best_total) break;
    probe.clear();
    std::size_t lpm = 0;
    for (std::size_t i = 0; i < packet.size(); ++i) {
      if (schema_.key_fields[i].match_kind == MatchKind::kLpm) {
        Bytes masked = packet[i];
        ClearLowBits(masked, schema_.key_fields[i].bit_width - group->prefix_lens[lpm++]);
        AppendBytes(probe, masked);
      } else {
        AppendBytes(probe, packet[i]);
      }
    }
    auto hit = group->by_value.find(probe);
    if (hit == group->by_value.end()) continue;
    const StoredEntry* candidate = hit->second;
    if (best == nullptr || group->total > best_total ||
        candidate->insertion_seq < best->insertion_seq) {
      best = candidate;
      best_total = group->total;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

}  // namespace matctl
