// Copyright 2026 The agmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace agmap {

enum class ErrorKind {
  kInvalidInput,
  kEmptyRegion,
  kMissingReference,
  kDegenerateReference,
  kBackend,
  kNotFound,
  kSchema,
  kUnreachable,
  kAnchor,
  kInvalidPath,
  kEmptySession,
  kInvalidStart,
  kProtocol,
  kConflict,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid_input";
    case ErrorKind::kEmptyRegion: return "empty_region";
    case ErrorKind::kMissingReference: return "missing_reference";
    case ErrorKind::kDegenerateReference: return "degenerate_reference";
    case ErrorKind::kBackend: return "backend_error";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kSchema: return "schema_error";
    case ErrorKind::kUnreachable: return "unreachable";
    case ErrorKind::kAnchor: return "anchor_error";
    case ErrorKind::kInvalidPath: return "invalid_path";
    case ErrorKind::kEmptySession: return "empty_session";
    case ErrorKind::kInvalidStart: return "invalid_start";
    case ErrorKind::kProtocol: return "protocol_error";
    case ErrorKind::kConflict: return "conflict";
  }
  return "unknown";
}

/// Domain error raised by every agmap module. Schema errors also carry the
/// JSON path of the offending field (e.g. "objects[0].position").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string path = {})
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        kind_(kind),
        path_(std::move(path)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorKind kind_;
  std::string path_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, const std::string& message,
                    ErrorKind kind = ErrorKind::kInvalidInput) {
  if (!condition) throw Error(kind, message);
}

}  // namespace agmap
