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

#ifndef IODLAB_SIM_HARNESS_HPP
#define IODLAB_SIM_HARNESS_HPP

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "iodlab/crypto/rng.hpp"
#include "iodlab/protocol/registration.hpp"
#include "iodlab/protocol/session.hpp"
#include "iodlab/sim/config.hpp"
#include "iodlab/sim/transcript.hpp"

namespace iodlab {

struct UserSpec {
  Identity id;
  Password password;
};

struct DroneSpec {
  Identity id;
};

/// One root seed, one independent stream per label. A party's draws depend
/// only on the seed and its own label, never on what other parties drew.
class RandomStreams {
 public:
  explicit RandomStreams(std::uint64_t seed) : root_(seed) {}

  Rng& operator[](const std::string& label) {
    auto it = streams_.find(label);
    if (it == streams_.end()) it = streams_.emplace(label, root_.derive(label)).first;
    return it->second;
  }

 private:
  Rng root_;
  std::map<std::string, Rng> streams_;
};

struct Registration {
  ServerDatabase db;
  std::map<std::string, MobileDeviceStore> devices;  // by user identity
  std::map<std::string, DroneStore> drones;          // by drone identity
};

/// Runs both registration phases over the secure channel. Nothing here
/// reaches a Transcript. Drones register first so every device is
/// provisioned with the full (ID_j, PID_j) directory.
inline Registration run_registration(const SimConfig& config, std::span<const UserSpec> users,
                                     std::span<const DroneSpec> drones) {
  const Group& group = group_for(config.group);
  RandomStreams streams(config.seed);
  Registration out{ServerDatabase(config.group, group.random_scalar(streams["cs/secret"])), {}, {}};

  std::vector<DirectoryEntry> directory;
  for (const DroneSpec& spec : drones) {
    auto r = server_register_drone(std::move(out.db), spec.id,
                                   group.random_scalar(streams["cs/drone/" + spec.id.str()]));
    out.db = std::move(r.db);
    directory.push_back({r.response.id, r.response.pid});
    out.drones.emplace(spec.id.str(), provision_drone(r.response));
  }
  for (const UserSpec& spec : users) {
    Rng& device_rng = streams["device/" + spec.id.str()];
    Rng& cs_rng = streams["cs/user/" + spec.id.str()];
    Scalar d = group.random_scalar(device_rng);
    Digest ppw = user_register_request(spec.id, spec.password, d);
    Scalar f = group.random_scalar(cs_rng);
    Scalar q = group.random_scalar(cs_rng);
    auto r = server_register_user(std::move(out.db), spec.id, ppw, f, q);
    out.db = std::move(r.db);
    out.devices.emplace(spec.id.str(), provision_device(d, r.response, directory));
  }
  return out;
}

struct HopLatencies {
  Millis user_to_cs = 0;
  Millis cs_to_drone = 0;
  Millis drone_to_user = 0;

  static HopLatencies uniform(Millis ms) noexcept { return {ms, ms, ms}; }
};

/// In-transit hooks for an active adversary. Each sees the message after it
/// has been logged as sent and may rewrite what gets delivered.
struct ChannelTap {
  std::function<void(M1&)> on_m1;
  std::function<void(M2&)> on_m2;
  std::function<void(M3&)> on_m3;
};

struct SessionParties {
  const ServerDatabase& db;
  const MobileDeviceStore& device;
  const UserSpec& user;  // what the user types at login
  const DroneStore& drone;
};

struct SessionResult {
  SessionKey user_key;
  SessionKey drone_key;
  M1 m1;
  M2 m2;
  M3 m3;
};

/// Login and authentication over the public channel. T_1..T_4 are read
/// from `clock` at each party's turn; each hop advances it by its latency.
/// Protocol rejections propagate as Error after the offending message has
/// been logged.
inline SessionResult run_honest_session(const SimConfig& config, const SessionParties& parties, Clock& clock,
                                        Transcript& transcript, RandomStreams& streams, std::string_view label,
                                        const HopLatencies& hops, const ChannelTap& tap = {}) {
  const Group& group = group_for(config.group);
  const std::string tag(label);
  Rng& user_rng = streams["session/user/" + parties.user.id.str()];
  Rng& drone_rng = streams["session/drone/" + parties.drone.id.str()];

  Timestamp t1 = clock.now();
  LoginStart login = user_login_start(group, parties.device, parties.user.id, parties.user.password,
                                      parties.drone.pid, t1, group.random_scalar(user_rng));
  transcript.append({Direction::user_to_cs, login.m1, t1, tag});
  M1 m1 = login.m1;
  if (tap.on_m1) tap.on_m1(m1);
  clock.advance(hops.user_to_cs);

  Timestamp t2 = clock.now();
  M2 m2 = server_process_m1(parties.db, m1, t2, config.delta_t_ms);
  transcript.append({Direction::cs_to_drone, m2, t2, tag});
  M2 delivered_m2 = m2;
  if (tap.on_m2) tap.on_m2(delivered_m2);
  clock.advance(hops.cs_to_drone);

  Timestamp t3 = clock.now();
  DroneResponse resp =
      drone_process_m2(group, parties.drone, delivered_m2, t3, config.delta_t_ms, group.random_scalar(drone_rng));
  transcript.append({Direction::drone_to_user, resp.m3, t3, tag});
  M3 m3 = resp.m3;
  if (tap.on_m3) tap.on_m3(m3);
  clock.advance(hops.drone_to_user);

  SessionKey user_key = user_process_m3(group, login.state, m3, clock.now(), config.delta_t_ms);
  return {user_key, resp.sk, login.m1, m2, resp.m3};
}

inline SessionResult run_honest_session(const SimConfig& config, const SessionParties& parties, Clock& clock,
                                        Transcript& transcript, RandomStreams& streams, std::string_view label) {
  return run_honest_session(config, parties, clock, transcript, streams, label,
                            HopLatencies::uniform(config.latency_ms));
}

}  // namespace iodlab

#endif  // IODLAB_SIM_HARNESS_HPP
