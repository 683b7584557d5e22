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

#include "matctl/bytes.h"

#include <algorithm>

namespace matctl {

std::size_t SignificantBits(std::span<const std::uint8_t> value) {
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (value[i] != 0) {
      std::size_t bits = 8;
      while ((value[i] & (1u << (bits - 1))) == 0) --bits;
      return (value.size() - i - 1) * 8 + bits;
    }
  }
  return 0;
}

bool FitsWidth(std::span<const std::uint8_t> value, std::size_t bit_width) {
  return value.size() == (bit_width + 7) / 8 &&
         SignificantBits(value) <= bit_width;
}

std::optional<Bytes> ResizeToWidth(std::span<const std::uint8_t> value,
                                   std::size_t bit_width) {
  if (SignificantBits(value) > bit_width) return std::nullopt;
  const std::size_t width = (bit_width + 7) / 8;
  Bytes out(width, 0);
  const std::size_t n = std::min(width, value.size());
  std::copy(value.end() - static_cast<std::ptrdiff_t>(n), value.end(),
            out.end() - static_cast<std::ptrdiff_t>(n));
  return out;
}

void ClearLowBits(Bytes& value, std::size_t count) {
  for (std::size_t i = value.size(); i-- > 0 && count > 0;) {
    if (count >= 8) {
      value[i] = 0;
      count -= 8;
    } else {
      value[i] &= static_cast<std::uint8_t>(0xFFu << count);
      count = 0;
    }
  }
}

Bytes BytesFromUint(std::uint64_t v, std::size_t byte_width) {
  Bytes out(byte_width, 0);
  for (std::size_t i = byte_width; i-- > 0 && v != 0;) {
    out[i] = static_cast<std::uint8_t>(v & 0xFF);
    v >>= 8;
  }
  return out;
}

std::string ToHex(std::span<const std::uint8_t> value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out = "0x";
  for (std::uint8_t b : value) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xF];
  }
  return out;
}

}  // namespace matctl
