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


#include "testing/oracles.h"

#include <algorithm>

namespace matctl::testing {

bool BitAt(const Bytes& value, std::uint32_t field_width, std::uint32_t i) {
  const std::uint32_t pos = field_width - 1 - i;
  const std::size_t byte = value.size() - 1 - pos / 8;
  return ((value[byte] >> (pos % 8)) & 1) != 0;
}

const FieldMatch* TableOracle::Field(const MatchKey& key, std::size_t i) const {
  for (const auto& f : key.fields) {
    if (f.field_id == table_.key_fields[i].id) return &f;
  }
  return nullptr;
}

bool TableOracle::SameKey(const MatchKey& a, const MatchKey& b) const {
  for (std::size_t i = 0; i < table_.key_fields.size(); ++i) {
    const std::uint32_t w = table_.key_fields[i].bit_width;
    const MatchValue& x = Field(a, i)->match;
    const MatchValue& y = Field(b, i)->match;
    switch (*table_.key_fields[i].match_kind) {
      case MatchKind::kExact:
        for (std::uint32_t bit = 0; bit < w; ++bit) {
          if (BitAt(x.value, w, bit) != BitAt(y.value, w, bit)) return false;
        }
        break;
      case MatchKind::kLpm:
        if (x.prefix_len != y.prefix_len) return false;
        for (std::uint32_t bit = 0; bit < x.prefix_len; ++bit) {
          if (BitAt(x.value, w, bit) != BitAt(y.value, w, bit)) return false;
        }
        break;
      case MatchKind::kTernary:
        for (std::uint32_t bit = 0; bit < w; ++bit) {
          const bool mx = BitAt(x.mask, w, bit);
          if (mx != BitAt(y.mask, w, bit)) return false;
          if (mx && BitAt(x.value, w, bit) != BitAt(y.value, w, bit)) return false;
        }
        break;
    }
  }
  if (table_.HasMatchKind(MatchKind::kTernary)) return a.priority == b.priority;
  return true;
}

bool TableOracle::Covers(const MatchKey& key, const std::vector<Bytes>& packet) const {
  for (std::size_t i = 0; i < table_.key_fields.size(); ++i) {
    const std::uint32_t w = table_.key_fields[i].bit_width;
    const MatchValue& m = Field(key, i)->match;
    for (std::uint32_t bit = 0; bit < w; ++bit) {
      bool care = true;
      if (m.kind == MatchKind::kLpm) care = bit < m.prefix_len;
      if (m.kind == MatchKind::kTernary) care = BitAt(m.mask, w, bit);
      if (care && BitAt(m.value, w, bit) != BitAt(packet[i], w, bit)) return false;
    }
  }
  return true;
}

bool TableOracle::Insert(const MatchKey& key, std::uint32_t action_id) {
  for (const auto& e : entries_) {
    if (SameKey(e.key, key)) return false;
  }
  if (entries_.size() >= table_.capacity) return false;
  entries_.push_back(Entry{key, action_id, next_seq_++});
  return true;
}

bool TableOracle::Erase(const MatchKey& key) {
  for (auto it = entries_.begin(); it != entries_.end(); ++it) {
    if (SameKey(it->key, key)) {
      entries_.erase(it);
      return true;
    }
  }
  return false;
}

std::optional<std::size_t> TableOracle::Lookup(const std::vector<Bytes>& packet) const {
  const bool ternary = table_.HasMatchKind(MatchKind::kTernary);
  std::optional<std::size_t> best;
  std::uint64_t best_rank = 0;
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    if (!Covers(entries_[e].key, packet)) continue;
    std::uint64_t rank = 0;
    if (ternary) {
      rank = entries_[e].key.priority;
    } else {
      for (std::size_t i = 0; i < table_.key_fields.size(); ++i) {
        const MatchValue& m = Field(entries_[e].key, i)->match;
        if (m.kind == MatchKind::kLpm) rank += m.prefix_len;
      }
    }
    // entries_ is in insertion order, so strict > keeps the earliest on ties.
    if (!best.has_value() || rank > best_rank) {
      best = e;
      best_rank = rank;
    }
  }
  return best;
}

}  // namespace matctl::testing
