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

#ifndef IODLAB_CLI_CLI_HPP
#define IODLAB_CLI_CLI_HPP

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "iodlab/attacks/attacks.hpp"
#include "iodlab/persistence/files.hpp"
#include "iodlab/sim/harness.hpp"
#include "iodlab/sim/scenario.hpp"

namespace iodlab::cli {

/// Process exit codes. Stable; scripts depend on them.
enum Exit : int {
  kOk = 0,
  kIo = 1,
  kDuplicate = 2,
  kRejected = 3,
  kAttackFailed = 4,
  kUsage = 64,
};

inline int exit_code_for(const Error& e) {
  if (e.is_protocol_rejection()) return kRejected;
  switch (e.kind()) {
    case ErrorKind::duplicate_identity: return kDuplicate;
    case ErrorKind::invalid_argument:
    case ErrorKind::unknown_scenario: return kUsage;
    default: return kIo;
  }
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> group;
  std::optional<Millis> delta_t;
  std::optional<Millis> latency;
};

/// Defaults < --config file < IOD_LAB_GROUP < explicit flags.
inline SimConfig resolve_config(const CommonFlags& f) {
  SimConfig c;
  if (!f.config_path.empty()) c = persist::load_config(f.config_path, c);
  if (const char* env = std::getenv("IOD_LAB_GROUP"); env && *env) c.group = parse_group_id(env);
  if (f.group) c.group = parse_group_id(*f.group);
  if (f.seed) c.seed = *f.seed;
  if (f.delta_t) c.delta_t_ms = *f.delta_t;
  if (f.latency) c.latency_ms = *f.latency;
  return c;
}

namespace detail {

inline std::string sibling(const std::string& of, const std::string& name) {
  return (std::filesystem::path(of).parent_path() / name).string();
}

/// Existing database, or a fresh one when `init` is set and the file is absent.
inline ServerDatabase open_database(const std::string& path, bool init, const SimConfig& config,
                                    bool group_explicit) {
  if (init && !std::filesystem::exists(path)) {
    RandomStreams streams(config.seed);
    return ServerDatabase(config.group, group_for(config.group).random_scalar(streams["cs/secret"]));
  }
  ServerDatabase db = persist::load_server_database(path);
  if (group_explicit && db.group() != config.group) {
    throw Error(ErrorKind::invalid_argument, "database uses the " + std::string(to_string(db.group())) + " group");
  }
  return db;
}

inline const UserRecord& pick_user(const StolenVerifier& leak, const std::string& id) {
  const UserRecord* best = nullptr;
  for (const auto& u : leak.users) {
    if (id.empty() ? (!best || u.id < best->id) : u.id.str() == id) best = &u;
  }
  if (!best) throw Error(ErrorKind::invalid_argument, id.empty() ? "leak holds no users" : "no leaked user '" + id + "'");
  return *best;
}

inline const DroneRecord& pick_drone(const StolenVerifier& leak, const std::string& id) {
  const DroneRecord* best = nullptr;
  for (const auto& d : leak.drones) {
    if (id.empty() ? (!best || d.id < best->id) : d.id.str() == id) best = &d;
  }
  if (!best) {
    throw Error(ErrorKind::invalid_argument, id.empty() ? "leak holds no drones" : "no leaked drone '" + id + "'");
  }
  return *best;
}

inline void finish(ScenarioReport& r, std::string_view ok, std::string_view bad) {
  r.success = !r.checks.empty();
  for (const auto& [name, passed] : r.checks) r.success = r.success && passed;
  r.verdict = std::string(r.success ? ok : bad);
}

}  // namespace detail

struct RegisterArgs {
  std::string id, password, db, out;
  bool init = false;
};

inline int cmd_register_user(const RegisterArgs& a, const CommonFlags& flags, std::ostream& out) {
  SimConfig config = resolve_config(flags);
  ServerDatabase db = detail::open_database(a.db, a.init, config, flags.group.has_value());
  const Group& group = group_for(db.group());
  Identity id(a.id);
  Password pw(a.password);
  RandomStreams streams(config.seed);
  Scalar d = group.random_scalar(streams["device/" + id.str()]);
  Rng& cs_rng = streams["cs/user/" + id.str()];
  Scalar f = group.random_scalar(cs_rng);
  Scalar q = group.random_scalar(cs_rng);

  std::vector<DirectoryEntry> directory;
  for (const auto& [pid, rec] : db.drones()) directory.push_back({rec.id, rec.pid});
  auto r = server_register_user(std::move(db), id, user_register_request(id, pw, d), f, q);
  MobileDeviceStore store = provision_device(d, r.response, directory);

  std::string device_path = a.out.empty() ? detail::sibling(a.db, id.str() + ".device.json") : a.out;
  persist::save_database(r.db, a.db);
  persist::save_device(r.db.group(), store, device_path);
  out << "registered user " << id.str() << "\n"
      << "FID " << hash_fields({id, store.f}).hex() << "\n"
      << "device " << device_path << "\n";
  return kOk;
}

inline int cmd_register_drone(const RegisterArgs& a, const CommonFlags& flags, std::ostream& out) {
  SimConfig config = resolve_config(flags);
  ServerDatabase db = detail::open_database(a.db, a.init, config, flags.group.has_value());
  Identity id(a.id);
  RandomStreams streams(config.seed);
  Scalar a_j = group_for(db.group()).random_scalar(streams["cs/drone/" + id.str()]);
  auto r = server_register_drone(std::move(db), id, a_j);
  std::string drone_path = a.out.empty() ? detail::sibling(a.db, id.str() + ".drone.json") : a.out;
  persist::save_database(r.db, a.db);
  persist::save_drone(provision_drone(r.response), drone_path);
  out << "registered drone " << id.str() << "\n"
      << "PID " << r.response.pid.hex() << "\n"
      << "store " << drone_path << "\n";
  return kOk;
}

struct SessionArgs {
  std::string user_store, drone_store, db, id, password, out;
  bool append = false;
};

inline int cmd_session(const SessionArgs& a, const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  SimConfig config = resolve_config(flags);
  ServerDatabase db = persist::load_server_database(a.db);
  MobileDeviceStore device = persist::load_device(a.user_store);
  DroneStore drone = persist::load_drone(a.drone_store);
  if (persist::load_device_group(a.user_store) != db.group()) {
    throw Error(ErrorKind::invalid_argument, "device store and database use different groups");
  }
  config.group = db.group();
  UserSpec user{Identity(a.id), Password(a.password)};

  Transcript transcript;
  if (a.append && !a.out.empty() && std::filesystem::exists(a.out)) transcript = persist::import_transcript(a.out);
  Clock clock;
  std::size_t n = 0;
  for (const auto& e : transcript.entries()) {
    clock.advance_to(Timestamp{e.sent_at.ms + config.latency_ms});
    if (std::holds_alternative<M1>(e.message) && label_owner(e.session_label) == user.id.str()) ++n;
  }
  std::string label = user.id.str() + "#" + std::to_string(n);
  // Each session of a user draws from its own stream so appended runs under
  // one --seed never reuse an ephemeral.
  RandomStreams streams(Rng(config.seed).derive("cli/session/" + label).seed());

  std::optional<SessionResult> result;
  std::optional<Error> failure;
  try {
    result = run_honest_session(config, {db, device, user, drone}, clock, transcript, streams, label);
  } catch (const Error& e) {
    if (!e.is_protocol_rejection()) throw;
    failure = e;
  }
  if (!a.out.empty()) persist::export_transcript(transcript, a.out);
  if (failure) {
    err << "session rejected: " << failure->what() << "\n";
    return kRejected;
  }
  out << "session " << label << "\n"
      << "sk_user  " << result->user_key.sk.hex() << "\n"
      << "sk_drone " << result->drone_key.sk.hex() << "\n";
  if (result->user_key != result->drone_key) {
    err << "session keys differ\n";
    return kRejected;
  }
  out << "keys match\n";
  return kOk;
}

struct AttackArgs {
  std::string kind, db, stolen, transcript, drone_store, out, victim, target, save_leak;
};

inline StolenVerifier load_leak(const AttackArgs& a) {
  if (a.stolen.empty() && a.db.empty()) throw Error(ErrorKind::invalid_argument, a.kind + " needs --stolen or --db");
  StolenVerifier leak = persist::load_stolen_verifier(a.stolen.empty() ? a.db : a.stolen);
  if (!a.save_leak.empty()) persist::save_stolen_verifier(leak, a.save_leak);
  return leak;
}

inline ScenarioReport attack_track(const AttackArgs& a, const SimConfig& config) {
  if (a.transcript.empty()) throw Error(ErrorKind::invalid_argument, "track needs --transcript");
  ScenarioReport r{"track", config, {}, false, {}, {}, {}};
  LinkageMap links = link_sessions(persist::import_adversary_view(a.transcript));
  std::size_t observed = 0;
  for (const auto& [fid, members] : links.classes) observed += members.size();
  r.details["m1_observed"] = std::to_string(observed);
  r.details["linked_classes"] = std::to_string(links.classes.size());

  // Scoring needs the capture's ground-truth labels; linking never does.
  std::optional<Transcript> labelled;
  try {
    labelled = persist::import_transcript(a.transcript);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::format) throw;
  }
  if (!labelled) {
    r.details["ground_truth"] = "absent";
    r.checks["linked"] = !links.classes.empty();
    detail::finish(r, "linked-unscored", "nothing-linked");
    return r;
  }
  std::set<std::string> owners;
  for (const auto& e : labelled->entries()) {
    if (std::holds_alternative<M1>(e.message)) owners.insert(label_owner(e.session_label));
  }
  r.details["users"] = std::to_string(owners.size());
  r.checks["partition_exact"] = partition_matches_ground_truth(*labelled, links);
  r.transcript = std::move(*labelled);
  detail::finish(r, "linkage-perfect", "linkage-imperfect");
  return r;
}

inline ScenarioReport attack_impersonate_user(const AttackArgs& a, SimConfig config) {
  if (a.db.empty()) throw Error(ErrorKind::invalid_argument, "impersonate-user needs --db for the honest server");
  ServerDatabase server = persist::load_server_database(a.db);
  StolenVerifier leak = load_leak(a);
  config.group = server.group();
  std::optional<DroneStore> drone;
  if (!a.drone_store.empty()) drone = persist::load_drone(a.drone_store);
  const UserRecord& victim = detail::pick_user(leak, a.victim);
  const DroneRecord& target = detail::pick_drone(leak, drone && a.target.empty() ? drone->id.str() : a.target);

  ScenarioReport r{"steal-impersonate-user", config, {}, false, {}, {}, {}};
  Clock clock;
  RandomStreams streams(config.seed);
  UserImpersonation out = impersonate_user(config, server, drone ? &*drone : nullptr, leak, victim.fid, target.pid,
                                           clock, r.transcript, streams);
  r.checks["server_accepted"] = out.relayed.has_value();
  r.details["victim"] = victim.id.str();
  r.details["target"] = target.id.str();
  if (drone) {
    r.details["drone_accepted"] = out.drone_accepted ? "true" : "false";
    r.details["attacker_key_matches_drone"] = out.attacker_key_matches_drone ? "true" : "false";
  }
  if (!out.server_error.empty()) r.details["error"] = out.server_error;
  detail::finish(r, "server-accepted-forgery", "forgery-rejected");
  return r;
}

inline ScenarioReport attack_impersonate_server(const AttackArgs& a, SimConfig config) {
  if (a.drone_store.empty()) throw Error(ErrorKind::invalid_argument, "impersonate-server needs --drone-store");
  StolenVerifier leak = load_leak(a);
  DroneStore drone = persist::load_drone(a.drone_store);
  config.group = leak.group;
  const UserRecord& victim = detail::pick_user(leak, a.victim);

  ScenarioReport r{"steal-impersonate-server", config, {}, false, {}, {}, {}};
  Clock clock;
  RandomStreams streams(config.seed);
  ServerImpersonation out =
      impersonate_server(config, drone, leak, victim.fid, drone.pid, clock, r.transcript, streams);
  r.checks["drone_accepted"] = out.answer.has_value();
  r.checks["keys_match"] = out.drone_key && out.attacker_key && *out.drone_key == *out.attacker_key;
  r.details["victim"] = victim.id.str();
  r.details["target"] = drone.id.str();
  if (out.attacker_key) r.details["sk_attacker"] = out.attacker_key->sk.hex();
  if (out.drone_key) r.details["sk_drone"] = out.drone_key->sk.hex();
  if (!out.drone_error.empty()) r.details["error"] = out.drone_error;
  detail::finish(r, "drone-accepted-forgery", "forgery-rejected");
  return r;
}

inline void print_report(const ScenarioReport& r, std::ostream& out) {
  out << r.scenario << ": " << r.verdict << "\n";
  for (const auto& [name, passed] : r.checks) out << "  " << name << " = " << (passed ? "true" : "false") << "\n";
  for (const auto& [name, value] : r.details) out << "  " << name << ": " << value << "\n";
}

inline int cmd_attack(const AttackArgs& a, const CommonFlags& flags, std::ostream& out) {
  SimConfig config = resolve_config(flags);
  ScenarioReport r;
  if (a.kind == "track") {
    r = attack_track(a, config);
  } else if (a.kind == "impersonate-user") {
    r = attack_impersonate_user(a, config);
  } else {
    r = attack_impersonate_server(a, config);
  }
  if (!a.out.empty()) persist::save_report(r, a.out);
  print_report(r, out);
  return r.success ? kOk : kAttackFailed;
}

/// Re-derives what the report's own transcript determines and checks the
/// recorded verdict against it. Exit 0 iff consistent and successful.
inline int cmd_verify_report(const std::string& path, std::ostream& out, std::ostream& err) {
  ScenarioReport r = persist::load_report(path);
  std::vector<std::string> problems;
  if (r.verdict != "protocol-rejected") {
    bool all = !r.checks.empty();
    for (const auto& [name, passed] : r.checks) all = all && passed;
    if (all != r.success) problems.push_back("success flag disagrees with checks");
  } else if (r.success) {
    problems.push_back("rejected run marked successful");
  }
  if (r.scenario == "track" && r.checks.contains("partition_exact")) {
    LinkageMap links = link_sessions(adversary_view(r.transcript));
    if (partition_matches_ground_truth(r.transcript, links) != r.checks.at("partition_exact")) {
      problems.push_back("partition_exact does not match the embedded transcript");
    }
  }
  if (r.checks.contains("keys_match") && r.details.contains("sk_attacker") && r.details.contains("sk_drone")) {
    if ((r.details.at("sk_attacker") == r.details.at("sk_drone")) != r.checks.at("keys_match")) {
      problems.push_back("keys_match disagrees with the recorded keys");
    }
  }
  print_report(r, out);
  for (const auto& p : problems) err << "inconsistent: " << p << "\n";
  return problems.empty() && r.success ? kOk : kAttackFailed;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Authentication-protocol lab: registration, sessions and attack demos", "iodlab"};
  app.require_subcommand(1, 1);
  CommonFlags flags;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "JSON config file");
    sub->add_option("--seed", flags.seed, "Root seed for every random draw");
    sub->add_option("--group", flags.group, "Group: curve or toy")->check(CLI::IsMember({"curve", "toy"}));
  };

  RegisterArgs reg;
  auto* ru = app.add_subcommand("register-user", "Register a user and write its device store");
  ru->add_option("--id", reg.id, "User identity")->required();
  ru->add_option("--password", reg.password, "User password")->required();
  ru->add_option("--db", reg.db, "Server database file")->required();
  ru->add_option("--out", reg.out, "Device store path (default: <id>.device.json beside --db)");
  ru->add_flag("--init", reg.init, "Create the database if it does not exist");
  common(ru);

  auto* rd = app.add_subcommand("register-drone", "Register a drone and write its store");
  rd->add_option("--id", reg.id, "Drone identity")->required();
  rd->add_option("--db", reg.db, "Server database file")->required();
  rd->add_option("--out", reg.out, "Drone store path (default: <id>.drone.json beside --db)");
  rd->add_flag("--init", reg.init, "Create the database if it does not exist");
  common(rd);

  SessionArgs sess;
  auto* se = app.add_subcommand("session", "Run one login and key agreement");
  se->add_option("--user-store", sess.user_store, "Device store file")->required();
  se->add_option("--drone-store", sess.drone_store, "Drone store file")->required();
  se->add_option("--db", sess.db, "Server database file")->required();
  se->add_option("--id", sess.id, "Identity typed at login")->required();
  se->add_option("--password", sess.password, "Password typed at login")->required();
  se->add_option("--out", sess.out, "Transcript file (JSON lines)");
  se->add_flag("--append", sess.append, "Append to an existing --out transcript");
  se->add_option("--delta-t", flags.delta_t, "Freshness window in ms");
  se->add_option("--latency", flags.latency, "Per-hop latency in ms");
  common(se);

  AttackArgs atk;
  auto* at = app.add_subcommand("attack", "Run an attack and write a report");
  at->add_option("--kind", atk.kind, "track, impersonate-user or impersonate-server")
      ->required()
      ->check(CLI::IsMember({"track", "impersonate-user", "impersonate-server"}));
  at->add_option("--db", atk.db, "Full server database (honest server; also a leak source)");
  at->add_option("--stolen", atk.stolen, "Stolen-verifier file");
  at->add_option("--transcript", atk.transcript, "Captured transcript (track)");
  at->add_option("--drone-store", atk.drone_store, "Honest drone store");
  at->add_option("--victim", atk.victim, "User to impersonate (default: first by identity)");
  at->add_option("--target", atk.target, "Drone to reach (default: the drone store, else first by identity)");
  at->add_option("--out", atk.out, "Report file");
  at->add_option("--save-leak", atk.save_leak, "Also write the stolen-verifier tables used");
  at->add_option("--delta-t", flags.delta_t, "Freshness window in ms");
  at->add_option("--latency", flags.latency, "Per-hop latency in ms");
  common(at);

  std::string report_path;
  auto* vr = app.add_subcommand("verify-report", "Check a report against its embedded transcript");
  vr->add_option("report", report_path, "Report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (ru->parsed()) return cmd_register_user(reg, flags, out);
    if (rd->parsed()) return cmd_register_drone(reg, flags, out);
    if (se->parsed()) return cmd_session(sess, flags, out, err);
    if (at->parsed()) return cmd_attack(atk, flags, out);
    return cmd_verify_report(report_path, out, err);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace iodlab::cli

#endif  // IODLAB_CLI_CLI_HPP
