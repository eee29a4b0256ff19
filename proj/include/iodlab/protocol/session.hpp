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

#ifndef IODLAB_PROTOCOL_SESSION_HPP
#define IODLAB_PROTOCOL_SESSION_HPP

#include <string>

#include "iodlab/protocol/registration.hpp"
#include "iodlab/protocol/types.hpp"

namespace iodlab {

namespace detail {

inline void require_fresh(Timestamp now, Timestamp sent, Millis delta_t, const char* who) {
  if (distance(now, sent) > delta_t) {
    throw Error(ErrorKind::stale_timestamp,
                std::string(who) + ": |" + std::to_string(now.ms) + " - " + std::to_string(sent.ms) +
                    "| exceeds " + std::to_string(delta_t) + " ms");
  }
}

}  // namespace detail

/// sk = h(ID_j || shared || K_i || FID_i), where shared is z_i g_j P.
inline SessionKey derive_session_key(const Identity& drone_id, const GroupElement& shared,
                                     const Digest& k, const Digest& fid) {
  return SessionKey{hash_fields({drone_id, shared, k, fid})};
}

/// Auth = h(sk || FID_i || T_3 || K_i)
inline Digest session_auth_tag(const SessionKey& sk, const Digest& fid, Timestamp t3, const Digest& k) {
  return hash_fields({sk.sk, fid, t3, k});
}

/// A1_i = h(T_1 || FID_i || K_i)
inline Digest login_tag(Timestamp t1, const Digest& fid, const Digest& k) {
  return hash_fields({t1, fid, k});
}

/// A3_i = h(PID_j || key_j || ID_j || K_i)
inline Digest server_tag(const Digest& pid, const Digest& key, const Identity& drone_id, const Digest& k) {
  return hash_fields({pid, key, drone_id, k});
}

struct LoginStart {
  M1 m1;
  UserSessionState state;
};

/// Device side: verify the typed credentials against B_i, then emit M1.
inline LoginStart user_login_start(const Group& group, const MobileDeviceStore& store, const Identity& id,
                                   const Password& pw, const Digest& target_pid, Timestamp t1,
                                   const Scalar& z) {
  if (!credentials_match(store, id, pw)) {
    throw Error(ErrorKind::session_rejected, "B*_i does not match the stored B_i");
  }
  const DirectoryEntry* drone = store.find_drone(target_pid);
  if (!drone) throw Error(ErrorKind::unknown_drone, "PID_j not in the device's drone directory");

  Digest fid = hash_fields({id, store.f});
  M1 m1{t1, group.mul_base(z), login_tag(t1, fid, store.k), fid, target_pid};
  return {std::move(m1), UserSessionState{z, fid, store.k, drone->drone_id, t1}};
}

/// Control server: freshness, table lookups, A1 check, then relay to the drone.
inline M2 server_process_m1(const ServerDatabase& db, const M1& m1, Timestamp t2, Millis delta_t) {
  detail::require_fresh(t2, m1.t1, delta_t, "server");
  const UserRecord* user = db.find_user(m1.fid);
  if (!user) throw Error(ErrorKind::unknown_user, "FID_i not in database");
  const DroneRecord* drone = db.find_drone(m1.pid);
  if (!drone) throw Error(ErrorKind::unknown_drone, "PID_j not in database");
  if (login_tag(m1.t1, m1.fid, user->k) != m1.a1) {
    throw Error(ErrorKind::auth_failure, "A1'_i != A1_i");
  }
  return M2{server_tag(drone->pid, drone->key, drone->id, user->k), t2, m1.z, drone->pid,
            xor_digests(user->k, drone->key), m1.fid};
}

struct DroneResponse {
  M3 m3;
  SessionKey sk;
};

inline DroneResponse drone_process_m2(const Group& group, const DroneStore& store, const M2& m2, Timestamp t3,
                                      Millis delta_t, const Scalar& g) {
  if (m2.pid != store.pid) throw Error(ErrorKind::not_for_me, "M2 addressed to another PID_j");
  detail::require_fresh(t3, m2.t2, delta_t, "drone");
  Digest k = xor_digests(m2.k_ij, store.key);
  if (server_tag(store.pid, store.key, store.id, k) != m2.a3) {
    throw Error(ErrorKind::auth_failure, "A3_j != A3_i");
  }
  SessionKey sk = derive_session_key(store.id, group.scalar_mult(g, m2.z), k, m2.fid);
  return {M3{group.mul_base(g), t3, session_auth_tag(sk, m2.fid, t3, k)}, sk};
}

/// Device side, final step. Consumes `state` whether or not it succeeds.
inline SessionKey user_process_m3(const Group& group, UserSessionState& state, const M3& m3, Timestamp t4,
                                  Millis delta_t) {
  if (state.consumed) throw Error(ErrorKind::state_consumed, "user session state already used");
  state.consumed = true;
  detail::require_fresh(t4, m3.t3, delta_t, "user");
  SessionKey sk = derive_session_key(state.drone_id, group.scalar_mult(state.z, m3.g), state.k, state.fid);
  if (session_auth_tag(sk, state.fid, m3.t3, state.k) != m3.auth) {
    throw Error(ErrorKind::auth_failure, "Auth_i != Auth_j");
  }
  return sk;
}

}  // namespace iodlab

#endif  // IODLAB_PROTOCOL_SESSION_HPP
