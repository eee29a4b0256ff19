// Copyright 2026 The iod-lab Authors
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

#ifndef IODLAB_ERROR_HPP
#define IODLAB_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace iodlab {

enum class ErrorKind {
  encoding,
  invalid_argument,
  duplicate_identity,
  session_rejected,
  unknown_user,
  unknown_drone,
  stale_timestamp,
  auth_failure,
  not_for_me,
  state_consumed,
  unknown_scenario,
  format,
  io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::encoding: return "EncodingError";
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::duplicate_identity: return "DuplicateIdentity";
    case ErrorKind::session_rejected: return "SessionRejected";
    case ErrorKind::unknown_user: return "UnknownUser";
    case ErrorKind::unknown_drone: return "UnknownDrone";
    case ErrorKind::stale_timestamp: return "StaleTimestamp";
    case ErrorKind::auth_failure: return "AuthFailure";
    case ErrorKind::not_for_me: return "NotForMe";
    case ErrorKind::state_consumed: return "StateConsumed";
    case ErrorKind::unknown_scenario: return "UnknownScenario";
    case ErrorKind::format: return "FormatError";
    case ErrorKind::io: return "IoError";
  }
  return "Unknown";
}

/// The single exception type thrown by the library. Callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for the rejections a protocol participant can raise on the wire.
  bool is_protocol_rejection() const noexcept {
    switch (kind_) {
      case ErrorKind::session_rejected:
      case ErrorKind::unknown_user:
      case ErrorKind::unknown_drone:
      case ErrorKind::stale_timestamp:
      case ErrorKind::auth_failure:
      case ErrorKind::not_for_me:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace iodlab

#endif  // IODLAB_ERROR_HPP
