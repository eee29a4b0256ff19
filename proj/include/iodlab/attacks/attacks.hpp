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

#ifndef IODLAB_ATTACKS_ATTACKS_HPP
#define IODLAB_ATTACKS_ATTACKS_HPP

#include <map>
#include <span>
#include <vector>

#include "iodlab/protocol/session.hpp"
#include "iodlab/sim/transcript.hpp"

// Everything in this header takes only what the adversary has: public
// channel traffic and the leaked verifier tables. No function here accepts
// a ServerDatabase, a password, d_i, f_i, or an honest party's ephemeral.

namespace iodlab {

/// The control server's stored tables after a database leak. The server
/// secret s is not part of it.
struct StolenVerifier {
  GroupId group = GroupId::curve;
  std::vector<UserRecord> users;
  std::vector<DroneRecord> drones;

  const UserRecord* find_user(const Digest& fid) const noexcept {
    for (const auto& u : users) {
      if (u.fid == fid) return &u;
    }
    return nullptr;
  }
  const DroneRecord* find_drone(const Digest& pid) const noexcept {
    for (const auto& d : drones) {
      if (d.pid == pid) return &d;
    }
    return nullptr;
  }

  friend bool operator==(const StolenVerifier&, const StolenVerifier&) = default;
};

/// Exfiltration: copy out (ID_i, FID_i, K_i) and (ID_j, PID_j, key_j).
inline StolenVerifier steal_verifier(const ServerDatabase& db) {
  StolenVerifier leak{db.group(), {}, {}};
  for (const auto& [fid, rec] : db.users()) leak.users.push_back(rec);
  for (const auto& [pid, rec] : db.drones()) leak.drones.push_back(rec);
  return leak;
}

/// FID_i -> positions (in the observed view) of every M1 carrying it.
struct LinkageMap {
  std::map<Digest, std::vector<std::size_t>> classes;

  friend bool operator==(const LinkageMap&, const LinkageMap&) = default;
};

/// Passive tracking. FID_i is static per user, so grouping intercepted M1s
/// by byte-equal FID_i links every session of the same user.
inline LinkageMap link_sessions(std::span<const ObservedMessage> view) {
  LinkageMap out;
  for (std::size_t i = 0; i < view.size(); ++i) {
    if (const M1* m1 = std::get_if<M1>(&view[i].message)) out.classes[m1->fid].push_back(i);
  }
  return out;
}

/// User impersonation from a stolen verifier: A1_i = h(T || FID_i || K_i)
/// with the leaked K_i and the attacker's own ephemeral z_a.
inline M1 forge_user_m1(const Group& group, const StolenVerifier& stolen, const Digest& fid, const Digest& pid,
                        Timestamp t, const Scalar& z_a) {
  const UserRecord* user = stolen.find_user(fid);
  if (!user) throw Error(ErrorKind::unknown_user, "target FID_i is not in the leaked table");
  return M1{t, group.mul_base(z_a), login_tag(t, fid, user->k), fid, pid};
}

/// Server impersonation toward a drone: rebuild K_ij and A3_i from the
/// leaked key_j, ID_j, K_i.
inline M2 forge_server_m2(const Group& group, const StolenVerifier& stolen, const Digest& pid, const Digest& fid,
                          Timestamp t, const Scalar& z_a) {
  const DroneRecord* drone = stolen.find_drone(pid);
  if (!drone) throw Error(ErrorKind::unknown_drone, "target PID_j is not in the leaked table");
  const UserRecord* user = stolen.find_user(fid);
  if (!user) throw Error(ErrorKind::unknown_user, "victim FID_i is not in the leaked table");
  return M2{server_tag(drone->pid, drone->key, drone->id, user->k), t, group.mul_base(z_a), drone->pid,
            xor_digests(user->k, drone->key), fid};
}

/// Completes the drone's session key from its M3 using the attacker's z_a.
inline SessionKey attacker_complete_key(const Group& group, const Scalar& z_a, const GroupElement& g,
                                        const Identity& drone_id, const Digest& k, const Digest& fid) {
  return derive_session_key(drone_id, group.scalar_mult(z_a, g), k, fid);
}

}  // namespace iodlab

#endif  // IODLAB_ATTACKS_ATTACKS_HPP
