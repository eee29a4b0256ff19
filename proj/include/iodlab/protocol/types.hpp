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

#ifndef IODLAB_PROTOCOL_TYPES_HPP
#define IODLAB_PROTOCOL_TYPES_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iodlab/crypto/digest.hpp"
#include "iodlab/crypto/group.hpp"
#include "iodlab/error.hpp"

namespace iodlab {

namespace detail {

inline bool is_valid_utf8(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x06 ? 2 : (c >> 4) == 0x0e ? 3 : (c >> 3) == 0x1e ? 4 : 0;
    if (len == 0 || i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xc0) != 0x80) return false;
    }
    i += len;
  }
  return true;
}

template <class Tag>
class BoundedText {
 public:
  static constexpr std::size_t kMaxBytes = 64;

  explicit BoundedText(std::string value) : value_(std::move(value)) {
    if (value_.empty() || value_.size() > kMaxBytes) {
      throw Error(ErrorKind::invalid_argument,
                  std::string(Tag::kName) + " must be 1-64 bytes, got " + std::to_string(value_.size()));
    }
    if (!is_valid_utf8(value_)) {
      throw Error(ErrorKind::invalid_argument, std::string(Tag::kName) + " is not valid UTF-8");
    }
  }

  const std::string& str() const noexcept { return value_; }
  ByteView encoded() const noexcept { return as_byte_view(value_); }

  friend auto operator<=>(const BoundedText&, const BoundedText&) = default;

 private:
  std::string value_;
};

struct IdentityTag {
  static constexpr const char* kName = "identity";
};
struct PasswordTag {
  static constexpr const char* kName = "password";
};

}  // namespace detail

using Identity = detail::BoundedText<detail::IdentityTag>;
using Password = detail::BoundedText<detail::PasswordTag>;

/// Logical milliseconds. Encoded as 8 bytes big-endian inside h(.).
struct Timestamp {
  std::uint64_t ms = 0;

  std::array<std::uint8_t, 8> encoded() const noexcept {
    std::array<std::uint8_t, 8> out{};
    for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(ms >> (56 - 8 * i));
    return out;
  }

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

using Millis = std::uint64_t;

/// |a - b| without wrap-around.
constexpr Millis distance(Timestamp a, Timestamp b) noexcept {
  return a.ms > b.ms ? a.ms - b.ms : b.ms - a.ms;
}

inline constexpr Millis kDefaultDeltaT = 5000;

struct DirectoryEntry {
  Identity drone_id;
  Digest pid;

  friend bool operator==(const DirectoryEntry&, const DirectoryEntry&) = default;
};

/// What the mobile device keeps after registration: {d_i, f_i, K_i, B_i}
/// plus the (ID_j, PID_j) directory it needs to compute sk_i.
struct MobileDeviceStore {
  Scalar d;
  Scalar f;
  Digest k;
  Digest b;
  std::vector<DirectoryEntry> drone_directory;

  const DirectoryEntry* find_drone(const Digest& pid) const noexcept {
    for (const auto& e : drone_directory) {
      if (e.pid == pid) return &e;
    }
    return nullptr;
  }

  friend bool operator==(const MobileDeviceStore&, const MobileDeviceStore&) = default;
};

struct DroneStore {
  Identity id;
  Digest pid;
  Digest key;

  friend bool operator==(const DroneStore&, const DroneStore&) = default;
};

struct UserRecord {
  Identity id;
  Digest fid;
  Digest k;

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

struct DroneRecord {
  Identity id;
  Digest pid;
  Digest key;

  friend bool operator==(const DroneRecord&, const DroneRecord&) = default;
};

/// Control-server state. Users are keyed by FID_i, drones by PID_j.
class ServerDatabase {
 public:
  ServerDatabase(GroupId group, Scalar secret) : group_(group), secret_(std::move(secret)) {}

  GroupId group() const noexcept { return group_; }
  const Scalar& secret() const noexcept { return secret_; }
  const std::map<Digest, UserRecord>& users() const noexcept { return users_; }
  const std::map<Digest, DroneRecord>& drones() const noexcept { return drones_; }

  const UserRecord* find_user(const Digest& fid) const noexcept {
    auto it = users_.find(fid);
    return it == users_.end() ? nullptr : &it->second;
  }
  const DroneRecord* find_drone(const Digest& pid) const noexcept {
    auto it = drones_.find(pid);
    return it == drones_.end() ? nullptr : &it->second;
  }
  const UserRecord* find_user_by_id(const Identity& id) const noexcept {
    for (const auto& [fid, rec] : users_) {
      if (rec.id == id) return &rec;
    }
    return nullptr;
  }
  const DroneRecord* find_drone_by_id(const Identity& id) const noexcept {
    for (const auto& [pid, rec] : drones_) {
      if (rec.id == id) return &rec;
    }
    return nullptr;
  }

  void insert(UserRecord rec) {
    if (find_user_by_id(rec.id) || users_.count(rec.fid)) {
      throw Error(ErrorKind::duplicate_identity, "user '" + rec.id.str() + "' already registered");
    }
    users_.emplace(rec.fid, std::move(rec));
  }
  void insert(DroneRecord rec) {
    if (find_drone_by_id(rec.id) || drones_.count(rec.pid)) {
      throw Error(ErrorKind::duplicate_identity, "drone '" + rec.id.str() + "' already registered");
    }
    drones_.emplace(rec.pid, std::move(rec));
  }

  friend bool operator==(const ServerDatabase&, const ServerDatabase&) = default;

 private:
  GroupId group_;
  Scalar secret_;
  std::map<Digest, UserRecord> users_;
  std::map<Digest, DroneRecord> drones_;
};

/// {T_1, z_iP, A1_i, FID_i, PID_j}
struct M1 {
  Timestamp t1;
  GroupElement z;
  Digest a1;
  Digest fid;
  Digest pid;

  friend bool operator==(const M1&, const M1&) = default;
};

/// {A3_i, T_2, z_iP, PID_j, K_ij, FID_i}
struct M2 {
  Digest a3;
  Timestamp t2;
  GroupElement z;
  Digest pid;
  Digest k_ij;
  Digest fid;

  friend bool operator==(const M2&, const M2&) = default;
};

/// {g_jP, T_3, Auth_j}
struct M3 {
  GroupElement g;
  Timestamp t3;
  Digest auth;

  friend bool operator==(const M3&, const M3&) = default;
};

struct SessionKey {
  Digest sk;

  friend bool operator==(const SessionKey&, const SessionKey&) = default;
};

/// Ephemeral user-side state between sending M1 and receiving M3. Single use.
struct UserSessionState {
  Scalar z;
  Digest fid;
  Digest k;
  Identity drone_id;
  Timestamp t1;
  bool consumed = false;
};

}  // namespace iodlab

#endif  // IODLAB_PROTOCOL_TYPES_HPP
