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

#ifndef MATCTL_BYTES_H_
#define MATCTL_BYTES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace matctl {

// Unsigned big-endian byte string. Field values of bit width w occupy
// ceil(w / 8) bytes, right-aligned.
using Bytes = std::vector<std::uint8_t>;

// Position of the highest set bit plus one; 0 for an all-zero value.
std::size_t SignificantBits(std::span<const std::uint8_t> value);

// True if value is exactly ceil(bit_width / 8) bytes long and has no bits set
// at or above bit_width.
bool FitsWidth(std::span<const std::uint8_t> value, std::size_t bit_width);

// Re-pads (or strips leading zero bytes from) value to ceil(bit_width / 8)
// bytes. nullopt if the value has a set bit at or above bit_width.
std::optional<Bytes> ResizeToWidth(std::span<const std::uint8_t> value,
                                   std::size_t bit_width);

// Zeroes the `count` least-significant bits.
void ClearLowBits(Bytes& value, std::size_t count);

Bytes BytesFromUint(std::uint64_t v, std::size_t byte_width);

std::string ToHex(std::span<const std::uint8_t> value);

}  // namespace matctl

#endif  // MATCTL_BYTES_H_
