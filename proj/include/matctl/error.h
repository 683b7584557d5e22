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

#ifndef MATCTL_ERROR_H_
#define MATCTL_ERROR_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace matctl {

// Library-level failure categories. Per-update outcomes of a write are not
// errors; they travel in a WriteReport as wire StatusCodes.
enum class ErrorCode {
  kMalformedSchema,
  kInvalidSchema,
  kNotFound,
  kEncodeInvariant,
  kMalformed,
  kInvalidKey,
  kInvalidAction,
  kValueOverflow,
  kSchemaMismatch,
  kConnectFailed,
  kTransportError,
  kRemoteMalformed,
  kDivideByZero,
  kInsufficientSamples,
  kInvalidArgument,
  kRunFailed,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> offset = std::nullopt);

  ErrorCode code() const { return code_; }
  // Byte offset into the offending frame, set for kMalformed decode errors.
  std::optional<std::size_t> offset() const { return offset_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> offset_;
};

}  // namespace matctl

#endif  // MATCTL_ERROR_H_
