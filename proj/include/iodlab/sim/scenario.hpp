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

#ifndef IODLAB_SIM_SCENARIO_HPP
#define IODLAB_SIM_SCENARIO_HPP

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "iodlab/attacks/attacks.hpp"
#include "iodlab/sim/harness.hpp"

namespace iodlab {

struct ScenarioDescriptor {
  std::string name;
  std::size_t users = 3;     // track only
  std::size_t sessions = 4;  // track only
};

struct ScenarioReport {
  std::string scenario;
  SimConfig config;
  std::string verdict;
  bool success = false;
  std::map<std::string, bool> checks;
  std::map<std::string, std::string> details;
  Transcript transcript;

  friend bool operator==(const ScenarioReport&, const ScenarioReport&) = default;
};

inline constexpr std::array<std::string_view, 6> kScenarioNames = {
    "honest", "tamper", "replay-in-window", "track", "steal-impersonate-user", "steal-impersonate-server"};

/// Ground truth for a transcript label "<user>#<n>" is the part before '#'.
inline std::string label_owner(std::string_view label) { return std::string(label.substr(0, label.find('#'))); }

/// True iff `links` partitions the transcript's M1 entries exactly as the
/// hidden labels do. Harness-side evaluation; the linker never sees labels.
inline bool partition_matches_ground_truth(const Transcript& transcript, const LinkageMap& links) {
  std::set<std::string> owners_seen;
  std::size_t covered = 0;
  for (const auto& [fid, members] : links.classes) {
    std::set<std::string> owners;
    for (std::size_t i : members) {
      if (i >= transcript.size()) return false;
      owners.insert(label_owner(transcript.entries()[i].session_label));
    }
    if (owners.size() != 1 || !owners_seen.insert(*owners.begin()).second) return false;
    covered += members.size();
  }
  std::size_t m1_total = 0;
  for (const auto& e : transcript.entries()) m1_total += std::holds_alternative<M1>(e.message) ? 1 : 0;
  return covered == m1_total;
}

struct UserImpersonation {
  M1 forged;
  std::optional<M2> relayed;  // set iff the server accepted
  std::string server_error;
  // Beyond the server's acceptance: drone answer and attacker key completion.
  bool drone_accepted = false;
  bool attacker_key_matches_drone = false;
};

/// Forge M1 from the leak, deliver it to the honest server, and forward the
/// server's M2 to the honest drone.
inline UserImpersonation impersonate_user(const SimConfig& config, const ServerDatabase& server,
                                          const DroneStore* drone, const StolenVerifier& leak, const Digest& fid,
                                          const Digest& pid, Clock& clock, Transcript& transcript,
                                          RandomStreams& streams) {
  const Group& group = group_for(config.group);
  Scalar z_a = group.random_scalar(streams["attacker"]);
  UserImpersonation out{forge_user_m1(group, leak, fid, pid, clock.now(), z_a), std::nullopt, {}, false, false};
  transcript.append({Direction::user_to_cs, out.forged, clock.now(), "attacker#0"});
  clock.advance(config.latency_ms);
  try {
    out.relayed = server_process_m1(server, out.forged, clock.now(), config.delta_t_ms);
  } catch (const Error& e) {
    if (!e.is_protocol_rejection()) throw;
    out.server_error = std::string(to_string(e.kind()));
    return out;
  }
  transcript.append({Direction::cs_to_drone, *out.relayed, clock.now(), "attacker#0"});
  if (!drone) return out;
  clock.advance(config.latency_ms);
  try {
    DroneResponse resp = drone_process_m2(group, *drone, *out.relayed, clock.now(), config.delta_t_ms,
                                          group.random_scalar(streams["session/drone/" + drone->id.str()]));
    transcript.append({Direction::drone_to_user, resp.m3, clock.now(), "attacker#0"});
    out.drone_accepted = true;
    const UserRecord* victim = leak.find_user(fid);
    const DroneRecord* target = leak.find_drone(pid);
    if (victim && target) {
      out.attacker_key_matches_drone =
          attacker_complete_key(group, z_a, resp.m3.g, target->id, victim->k, fid) == resp.sk;
    }
  } catch (const Error& e) {
    if (!e.is_protocol_rejection()) throw;
  }
  return out;
}

struct ServerImpersonation {
  M2 forged;
  std::optional<M3> answer;  // set iff the drone accepted
  std::string drone_error;
  std::optional<SessionKey> drone_key;
  std::optional<SessionKey> attacker_key;
};

/// Forge M2 from the leak and deliver it to the honest drone; on acceptance
/// finish the key exchange with the attacker's own ephemeral.
inline ServerImpersonation impersonate_server(const SimConfig& config, const DroneStore& drone,
                                              const StolenVerifier& leak, const Digest& fid, const Digest& pid,
                                              Clock& clock, Transcript& transcript, RandomStreams& streams) {
  const Group& group = group_for(config.group);
  Scalar z_a = group.random_scalar(streams["attacker"]);
  ServerImpersonation out{forge_server_m2(group, leak, pid, fid, clock.now(), z_a), {}, {}, {}, {}};
  transcript.append({Direction::cs_to_drone, out.forged, clock.now(), "attacker#0"});
  clock.advance(config.latency_ms);
  try {
    DroneResponse resp = drone_process_m2(group, drone, out.forged, clock.now(), config.delta_t_ms,
                                          group.random_scalar(streams["session/drone/" + drone.id.str()]));
    transcript.append({Direction::drone_to_user, resp.m3, clock.now(), "attacker#0"});
    out.answer = resp.m3;
    out.drone_key = resp.sk;
  } catch (const Error& e) {
    if (!e.is_protocol_rejection()) throw;
    out.drone_error = std::string(to_string(e.kind()));
    return out;
  }
  const DroneRecord* target = leak.find_drone(pid);
  const UserRecord* victim = leak.find_user(fid);
  out.attacker_key = attacker_complete_key(group, z_a, out.answer->g, target->id, victim->k, fid);
  return out;
}

namespace detail {

struct Cast {
  std::vector<UserSpec> users;
  std::vector<DroneSpec> drones;
};

inline Cast default_cast() {
  return {{{Identity("alice"), Password("correct horse")}, {Identity("bob"), Password("battery staple")}},
          {{Identity("drone-1")}}};
}

inline ScenarioReport start_report(const SimConfig& config, std::string_view name) {
  ScenarioReport r;
  r.scenario = std::string(name);
  r.config = config;
  return r;
}

inline void finish(ScenarioReport& r, std::string_view ok_verdict, std::string_view bad_verdict) {
  r.success = !r.checks.empty();
  for (const auto& [name, passed] : r.checks) r.success = r.success && passed;
  r.verdict = std::string(r.success ? ok_verdict : bad_verdict);
}

/// Honest session between the first user and first drone of `cast`,
/// recorded into the report's transcript.
inline std::optional<SessionResult> baseline(ScenarioReport& r, const Registration& reg, const Cast& cast,
                                             Clock& clock, RandomStreams& streams) {
  const UserSpec& user = cast.users.front();
  const DroneStore& drone = reg.drones.at(cast.drones.front().id.str());
  SessionParties parties{reg.db, reg.devices.at(user.id.str()), user, drone};
  try {
    return run_honest_session(r.config, parties, clock, r.transcript, streams, user.id.str() + "#0");
  } catch (const Error& e) {
    if (!e.is_protocol_rejection()) throw;
    r.details["error"] = std::string(to_string(e.kind()));
    r.verdict = "protocol-rejected";
    r.success = false;
    return std::nullopt;
  }
}

inline ScenarioReport run_honest(const SimConfig& config) {
  ScenarioReport r = start_report(config, "honest");
  Cast cast = default_cast();
  Registration reg = run_registration(config, cast.users, cast.drones);
  Clock clock;
  RandomStreams streams(config.seed);
  auto s = baseline(r, reg, cast, clock, streams);
  if (!s) return r;
  r.checks["keys_match"] = s->user_key == s->drone_key;
  r.details["sk_user"] = s->user_key.sk.hex();
  r.details["sk_drone"] = s->drone_key.sk.hex();
  finish(r, "keys-match", "keys-mismatch");
  return r;
}

inline ScenarioReport run_tamper(const SimConfig& config) {
  ScenarioReport r = start_report(config, "tamper");
  Cast cast = default_cast();
  Registration reg = run_registration(config, cast.users, cast.drones);
  Clock clock;
  RandomStreams streams(config.seed);
  if (!baseline(r, reg, cast, clock, streams)) return r;

  const UserSpec& user = cast.users.front();
  SessionParties parties{reg.db, reg.devices.at(user.id.str()), user, reg.drones.at(cast.drones.front().id.str())};
  auto mutate = [](Digest& d, std::size_t i) { d[i] ^= 0x01; };
  const std::array<std::string, 4> fields = {"a1", "a3", "k_ij", "auth"};
  std::size_t total = 0, rejected = 0;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    bool all = true;
    for (std::size_t i = 0; i < Digest::kSize; ++i) {
      ChannelTap tap;
      if (f == 0) tap.on_m1 = [&](M1& m) { mutate(m.a1, i); };
      if (f == 1) tap.on_m2 = [&](M2& m) { mutate(m.a3, i); };
      if (f == 2) tap.on_m2 = [&](M2& m) { mutate(m.k_ij, i); };
      if (f == 3) tap.on_m3 = [&](M3& m) { mutate(m.auth, i); };
      Transcript scratch;
      bool was_rejected = false;
      try {
        run_honest_session(config, parties, clock, scratch, streams, "tamper", HopLatencies::uniform(config.latency_ms),
                           tap);
      } catch (const Error& e) {
        was_rejected = e.kind() == ErrorKind::auth_failure;
      }
      ++total;
      rejected += was_rejected ? 1 : 0;
      all = all && was_rejected;
    }
    r.checks[fields[f] + "_all_rejected"] = all;
  }
  r.details["mutations"] = std::to_string(total);
  r.details["rejected"] = std::to_string(rejected);
  finish(r, "tamper-rejected", "tamper-accepted");
  return r;
}

inline ScenarioReport run_replay(const SimConfig& config) {
  ScenarioReport r = start_report(config, "replay-in-window");
  Cast cast = default_cast();
  Registration reg = run_registration(config, cast.users, cast.drones);
  Clock clock;
  RandomStreams streams(config.seed);
  auto s = baseline(r, reg, cast, clock, streams);
  if (!s) return r;

  // Re-send the captured M1 as late as the window allows.
  clock.advance_to(Timestamp{s->m1.t1.ms + config.delta_t_ms});
  r.transcript.append({Direction::user_to_cs, s->m1, clock.now(), "attacker#0"});
  bool accepted = false;
  try {
    M2 m2 = server_process_m1(reg.db, s->m1, clock.now(), config.delta_t_ms);
    r.transcript.append({Direction::cs_to_drone, m2, clock.now(), "attacker#0"});
    accepted = true;
  } catch (const Error& e) {
    if (!e.is_protocol_rejection()) throw;
    r.details["error"] = std::string(to_string(e.kind()));
  }
  r.checks["replay_accepted"] = accepted;
  r.details["replayed_at_ms"] = std::to_string(clock.now().ms);
  finish(r, "replay-accepted", "replay-rejected");
  return r;
}

inline ScenarioReport run_track(const SimConfig& config, std::size_t n_users, std::size_t n_sessions) {
  ScenarioReport r = start_report(config, "track");
  if (n_users == 0 || n_sessions == 0) throw Error(ErrorKind::invalid_argument, "track needs users and sessions");
  Cast cast;
  for (std::size_t u = 0; u < n_users; ++u) {
    std::string name = "user-" + std::to_string(u + 1);
    cast.users.push_back({Identity(name), Password("pw-" + name)});
  }
  cast.drones = {{Identity("drone-1")}, {Identity("drone-2")}};
  Registration reg = run_registration(config, cast.users, cast.drones);

  RandomStreams streams(config.seed);
  Rng& schedule_rng = streams["harness/schedule"];
  std::vector<std::pair<std::size_t, std::size_t>> schedule;
  for (std::size_t u = 0; u < n_users; ++u) {
    for (std::size_t n = 0; n < n_sessions; ++n) schedule.emplace_back(u, n);
  }
  for (std::size_t i = schedule.size(); i > 1; --i) {
    std::swap(schedule[i - 1], schedule[schedule_rng.uniform_below(i)]);
  }

  Clock clock;
  for (auto [u, n] : schedule) {
    const UserSpec& user = cast.users[u];
    const DroneStore& drone = reg.drones.at(cast.drones[schedule_rng.uniform_below(2)].id.str());
    SessionParties parties{reg.db, reg.devices.at(user.id.str()), user, drone};
    try {
      run_honest_session(config, parties, clock, r.transcript, streams, user.id.str() + "#" + std::to_string(n));
    } catch (const Error& e) {
      if (!e.is_protocol_rejection()) throw;
      r.details["error"] = std::string(to_string(e.kind()));
      r.verdict = "protocol-rejected";
      return r;
    }
  }

  LinkageMap links = link_sessions(adversary_view(r.transcript));
  r.checks["partition_exact"] = partition_matches_ground_truth(r.transcript, links);
  r.details["users"] = std::to_string(n_users);
  r.details["sessions_per_user"] = std::to_string(n_sessions);
  r.details["linked_classes"] = std::to_string(links.classes.size());
  finish(r, "linkage-perfect", "linkage-imperfect");
  return r;
}

/// First intercepted M1 gives the attacker a live (FID_i, PID_j) pair.
inline const M1* first_m1(const AdversaryView& view) {
  for (const auto& m : view) {
    if (const M1* m1 = std::get_if<M1>(&m.message)) return m1;
  }
  return nullptr;
}

inline ScenarioReport run_steal_user(const SimConfig& config) {
  ScenarioReport r = start_report(config, "steal-impersonate-user");
  Cast cast = default_cast();
  Registration reg = run_registration(config, cast.users, cast.drones);
  Clock clock;
  RandomStreams streams(config.seed);
  if (!baseline(r, reg, cast, clock, streams)) return r;

  AdversaryView view = adversary_view(r.transcript);
  M1 intercepted = *first_m1(view);
  StolenVerifier leak = steal_verifier(reg.db);
  const DroneStore& drone = reg.drones.at(cast.drones.front().id.str());
  UserImpersonation out =
      impersonate_user(config, reg.db, &drone, leak, intercepted.fid, intercepted.pid, clock, r.transcript, streams);
  r.checks["server_accepted"] = out.relayed.has_value();
  r.details["drone_accepted"] = out.drone_accepted ? "true" : "false";
  r.details["attacker_key_matches_drone"] = out.attacker_key_matches_drone ? "true" : "false";
  if (!out.server_error.empty()) r.details["error"] = out.server_error;
  finish(r, "server-accepted-forgery", "forgery-rejected");
  return r;
}

inline ScenarioReport run_steal_server(const SimConfig& config) {
  ScenarioReport r = start_report(config, "steal-impersonate-server");
  Cast cast = default_cast();
  Registration reg = run_registration(config, cast.users, cast.drones);
  Clock clock;
  RandomStreams streams(config.seed);
  if (!baseline(r, reg, cast, clock, streams)) return r;

  AdversaryView view = adversary_view(r.transcript);
  M1 intercepted = *first_m1(view);
  StolenVerifier leak = steal_verifier(reg.db);
  const DroneStore& drone = reg.drones.at(cast.drones.front().id.str());
  ServerImpersonation out =
      impersonate_server(config, drone, leak, intercepted.fid, intercepted.pid, clock, r.transcript, streams);
  r.checks["drone_accepted"] = out.answer.has_value();
  r.checks["keys_match"] = out.drone_key && out.attacker_key && *out.drone_key == *out.attacker_key;
  if (out.attacker_key) r.details["sk_attacker"] = out.attacker_key->sk.hex();
  if (out.drone_key) r.details["sk_drone"] = out.drone_key->sk.hex();
  if (!out.drone_error.empty()) r.details["error"] = out.drone_error;
  finish(r, "drone-accepted-forgery", "forgery-rejected");
  return r;
}

}  // namespace detail

/// Runs one named flow end to end. Deterministic in `config`.
inline ScenarioReport run_scenario(const SimConfig& config, const ScenarioDescriptor& scenario) {
  const std::string& n = scenario.name;
  if (n == "honest") return detail::run_honest(config);
  if (n == "tamper") return detail::run_tamper(config);
  if (n == "replay-in-window") return detail::run_replay(config);
  if (n == "track") return detail::run_track(config, scenario.users, scenario.sessions);
  if (n == "steal-impersonate-user") return detail::run_steal_user(config);
  if (n == "steal-impersonate-server") return detail::run_steal_server(config);
  throw Error(ErrorKind::unknown_scenario, "no scenario named '" + n + "'");
}

}  // namespace iodlab

#endif  // IODLAB_SIM_SCENARIO_HPP
