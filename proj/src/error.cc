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

#include "matctl/error.h"

namespace matctl {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedSchema: return "MALFORMED_SCHEMA";
    case ErrorCode::kInvalidSchema: return "INVALID_SCHEMA";
    case ErrorCode::kNotFound: return "NOT_FOUND";
    case ErrorCode::kEncodeInvariant: return "ENCODE_INVARIANT";
    case ErrorCode::kMalformed: return "MALFORMED";
    case ErrorCode::kInvalidKey: return "INVALID_KEY";
    case ErrorCode::kInvalidAction: return "INVALID_ACTION";
    case ErrorCode::kValueOverflow: return "VALUE_OVERFLOW";
    case ErrorCode::kSchemaMismatch: return "SCHEMA_MISMATCH";
    case ErrorCode::kConnectFailed: return "CONNECT_FAILED";
    case ErrorCode::kTransportError: return "TRANSPORT_ERROR";
    case ErrorCode::kRemoteMalformed: return "REMOTE_MALFORMED";
    case ErrorCode::kDivideByZero: return "DIVIDE_BY_ZERO";
    case ErrorCode::kInsufficientSamples: return "INSUFFICIENT_SAMPLES";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kRunFailed: return "RUN_FAILED";
  }
  return "UNKNOWN";
}

namespace {

std::string Render(ErrorCode code, const std::string& message,
                   std::optional<std::size_t> offset) {
  std::string out(ErrorCodeName(code));
  if (offset.has_value()) {
    out += " at offset " + std::to_string(*offset);
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> offset)
    : std::runtime_error(Render(code, message, offset)),
      code_(code),
      offset_(offset) {}

}  // namespace matctl
