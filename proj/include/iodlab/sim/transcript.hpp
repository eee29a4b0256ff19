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

#ifndef IODLAB_SIM_TRANSCRIPT_HPP
#define IODLAB_SIM_TRANSCRIPT_HPP

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iodlab/protocol/types.hpp"

namespace iodlab {

enum class Direction { user_to_cs, cs_to_drone, drone_to_user };

constexpr std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::user_to_cs: return "user->cs";
    case Direction::cs_to_drone: return "cs->drone";
    case Direction::drone_to_user: return "drone->user";
  }
  return "?";
}

inline Direction parse_direction(std::string_view s) {
  if (s == "user->cs") return Direction::user_to_cs;
  if (s == "cs->drone") return Direction::cs_to_drone;
  if (s == "drone->user") return Direction::drone_to_user;
  throw Error(ErrorKind::format, "unknown direction '" + std::string(s) + "'");
}

using Message = std::variant<M1, M2, M3>;

/// Harness-side logical clock shared by every party. Only the harness advances it.
class Clock {
 public:
  explicit Clock(Timestamp start = {}) : now_(start) {}

  Timestamp now() const noexcept { return now_; }
  void advance(Millis ms) noexcept { now_.ms += ms; }
  void advance_to(Timestamp t) noexcept {
    if (t > now_) now_ = t;
  }

 private:
  Timestamp now_;
};

/// A public-channel message as the eavesdropper sees it.
struct ObservedMessage {
  Direction direction;
  Message message;
  Timestamp sent_at;

  friend bool operator==(const ObservedMessage&, const ObservedMessage&) = default;
};

using AdversaryView = std::vector<ObservedMessage>;

struct TranscriptEntry {
  Direction direction;
  Message message;
  Timestamp sent_at;
  std::string session_label;  // ground truth, never shown to the adversary

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

/// Append-only log of public-channel traffic, ordered by send time.
class Transcript {
 public:
  void append(TranscriptEntry entry) {
    if (!entries_.empty() && entry.sent_at < entries_.back().sent_at) {
      throw Error(ErrorKind::invalid_argument, "transcript entries must be appended in send order");
    }
    entries_.push_back(std::move(entry));
  }

  const std::vector<TranscriptEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const Transcript&, const Transcript&) = default;

 private:
  std::vector<TranscriptEntry> entries_;
};

/// Strips the ground-truth labels.
inline AdversaryView adversary_view(const Transcript& transcript) {
  AdversaryView view;
  view.reserve(transcript.size());
  for (const auto& e : transcript.entries()) view.push_back({e.direction, e.message, e.sent_at});
  return view;
}

}  // namespace iodlab

#endif  // IODLAB_SIM_TRANSCRIPT_HPP
