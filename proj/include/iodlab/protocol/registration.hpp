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

#ifndef IODLAB_PROTOCOL_REGISTRATION_HPP
#define IODLAB_PROTOCOL_REGISTRATION_HPP

#include <utility>
#include <vector>

#include "iodlab/protocol/types.hpp"

namespace iodlab {

/// ppw_i = h(h(ID_i || d_i) xor h(PW_i || d_i)). Computed on the device;
/// only ppw_i crosses the secure channel.
inline Digest user_register_request(const Identity& id, const Password& pw, const Scalar& d) {
  Digest with_id = hash_fields({id, d});
  Digest with_pw = hash_fields({pw, d});
  return hash(xor_digests(with_id, with_pw).encoded());
}

struct UserRegistrationResponse {
  Scalar f;
  Digest k;
  Digest b;
};

struct UserRegistration {
  UserRegistrationResponse response;
  ServerDatabase db;
};

/// Control-server side of user registration. `q` is used once and dropped.
inline UserRegistration server_register_user(ServerDatabase db, const Identity& id, const Digest& ppw,
                                             const Scalar& f, const Scalar& q) {
  if (db.find_user_by_id(id)) {
    throw Error(ErrorKind::duplicate_identity, "user '" + id.str() + "' already registered");
  }
  Digest fid = hash_fields({id, f});
  Digest k = hash_fields({fid, db.secret(), q});
  Digest a = hash_fields({fid, ppw, f, k});
  Digest b = hash_fields({a, fid});
  db.insert(UserRecord{id, fid, k});
  return {UserRegistrationResponse{f, k, b}, std::move(db)};
}

inline MobileDeviceStore provision_device(const Scalar& d, const UserRegistrationResponse& response,
                                          std::vector<DirectoryEntry> drone_directory) {
  return MobileDeviceStore{d, response.f, response.k, response.b, std::move(drone_directory)};
}

/// The device-side B*_i check run at login: recompute ppw*_i, FID*_i, A*_i,
/// B*_i from the typed identity and password and compare against B_i.
inline bool credentials_match(const MobileDeviceStore& store, const Identity& id, const Password& pw) {
  Digest ppw = user_register_request(id, pw, store.d);
  Digest fid = hash_fields({id, store.f});
  Digest a = hash_fields({fid, ppw, store.f, store.k});
  return hash_fields({a, fid}) == store.b;
}

struct DroneRegistrationResponse {
  Identity id;
  Digest pid;
  Digest key;
};

struct DroneRegistration {
  DroneRegistrationResponse response;
  ServerDatabase db;
};

/// Control-server side of drone registration. A repeated ID_j is refused,
/// which is the "request another unique identity" branch.
inline DroneRegistration server_register_drone(ServerDatabase db, const Identity& id, const Scalar& a) {
  if (db.find_drone_by_id(id)) {
    throw Error(ErrorKind::duplicate_identity, "drone '" + id.str() + "' already registered");
  }
  Digest pid = hash_fields({a, id});
  Digest key = hash_fields({id, db.secret(), a});
  db.insert(DroneRecord{id, pid, key});
  return {DroneRegistrationResponse{id, pid, key}, std::move(db)};
}

inline DroneStore provision_drone(const DroneRegistrationResponse& response) {
  return DroneStore{response.id, response.pid, response.key};
}

}  // namespace iodlab

#endif  // IODLAB_PROTOCOL_REGISTRATION_HPP
