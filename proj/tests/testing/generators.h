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

// Random value generators shared by the property tests.

#ifndef MATCTL_TESTS_TESTING_GENERATORS_H_
#define MATCTL_TESTS_TESTING_GENERATORS_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "matctl/bytes.h"
#include "matctl/schema.h"
#include "matctl/wire.h"

namespace matctl::testing {

using Rng = std::mt19937_64;

std::uint64_t Uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi);
bool Coin(Rng& rng, double p = 0.5);
Bytes RandomBytes(Rng& rng, std::size_t n);
std::string RandomString(Rng& rng, std::size_t max_len);

// A value that fits in bit_width bits, byte_width bytes long.
Bytes RandomFieldValue(Rng& rng, std::uint32_t bit_width);

// Any message Encode accepts, across every body type.
Message RandomMessage(Rng& rng);

// A match-action table with 1..3 key fields of mixed kinds and small widths
// so random keys collide and overlap often.
TableSchema RandomTable(Rng& rng, std::uint32_t id);

// A schema-valid key, not necessarily canonical (host bits may be set).
MatchKey RandomKey(Rng& rng, const TableSchema& table);

TableUpdate RandomInsert(Rng& rng, const TableSchema& table);

// n updates over keys drawn from pool: INSERT, MODIFY and DELETE mixed with a
// few that must fail validation (unknown action, unknown table).
std::vector<TableUpdate> RandomMixedOps(Rng& rng, const TableSchema& table,
                                        const std::vector<MatchKey>& pool,
                                        std::size_t n);

// One value per key field in schema order. With probability hit_bias the
// packet is derived from one of keys so that it is likely to match.
std::vector<Bytes> RandomPacket(Rng& rng, const TableSchema& table,
                                const std::vector<MatchKey>& keys,
                                double hit_bias = 0.7);

}  // namespace matctl::testing

#endif  // MATCTL_TESTS_TESTING_GENERATORS_H_
