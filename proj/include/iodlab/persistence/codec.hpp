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

// JSON encodings for every persisted value. Digests, scalars and group
// elements are lowercase hex; objects use nlohmann's default sorted keys,
// so dumping the same value twice gives the same bytes.

#ifndef IODLAB_PERSISTENCE_CODEC_HPP
#define IODLAB_PERSISTENCE_CODEC_HPP

#include <string>
#include <functional>
#include <variant>

#include "json.hpp"

#include "iodlab/attacks/attacks.hpp"
#include "iodlab/sim/config.hpp"
#include "iodlab/sim/scenario.hpp"
#include "iodlab/sim/transcript.hpp"

namespace iodlab::persist {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

namespace detail {

[[noreturn]] inline void bad(const std::string& what) { throw Error(ErrorKind::format, what); }

inline const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object()) bad("expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) bad(std::string("missing key '") + key + "'");
  return *it;
}

inline std::string text(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_string()) bad(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

inline std::uint64_t number(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    bad(std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

inline Bytes hex_field(const Json& obj, const char* key) {
  try {
    return from_hex(text(obj, key));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::format) throw;
    bad(std::string("'") + key + "': " + e.what());
  }
}

inline Digest digest(const Json& obj, const char* key) {
  Bytes b = hex_field(obj, key);
  if (b.size() != Digest::kSize) {
    bad(std::string("'") + key + "' must be 32 bytes, got " + std::to_string(b.size()));
  }
  return Digest::from_bytes(b);
}

inline Scalar scalar(const Json& obj, const char* key, const Group& group) {
  try {
    return group.decode_scalar(hex_field(obj, key));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::format) throw;
    bad(std::string("'") + key + "': " + e.what());
  }
}

inline GroupElement element(const Json& obj, const char* key) {
  Bytes b = hex_field(obj, key);
  if (b.empty()) bad(std::string("'") + key + "' is empty");
  return GroupElement(std::move(b));
}

template <class T>
T wrap_invalid(const std::function<T()>& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_argument) bad(e.what());
    throw;
  }
}

inline Identity identity(const Json& obj, const char* key) {
  std::string s = text(obj, key);
  return wrap_invalid<Identity>([&] { return Identity(s); });
}

inline GroupId group_id(const Json& obj) {
  std::string s = text(obj, "group");
  return wrap_invalid<GroupId>([&] { return parse_group_id(s); });
}

inline void check_header(const Json& obj, const char* expected_kind) {
  if (number(obj, "version") != kFormatVersion) {
    bad("unsupported format version " + field(obj, "version").dump());
  }
  if (expected_kind && text(obj, "kind") != expected_kind) {
    bad("expected kind '" + std::string(expected_kind) + "', got '" + text(obj, "kind") + "'");
  }
}

}  // namespace detail

// Server database ---------------------------------------------------------------

enum class DatabaseExport { full, stolen_verifier };

inline Json user_to_json(const UserRecord& u) {
  return Json{{"id", u.id.str()}, {"fid", u.fid.hex()}, {"k", u.k.hex()}};
}
inline Json drone_to_json(const DroneRecord& d) {
  return Json{{"id", d.id.str()}, {"pid", d.pid.hex()}, {"key", d.key.hex()}};
}

inline Json database_to_json(const ServerDatabase& db, DatabaseExport mode) {
  Json users = Json::array(), drones = Json::array();
  for (const auto& [fid, rec] : db.users()) users.push_back(user_to_json(rec));
  for (const auto& [pid, rec] : db.drones()) drones.push_back(drone_to_json(rec));
  Json out{{"version", kFormatVersion},
           {"group", std::string(to_string(db.group()))},
           {"users", users},
           {"drones", drones}};
  if (mode == DatabaseExport::full) {
    out["kind"] = "full";
    out["s"] = db.secret().hex();
  } else {
    out["kind"] = "stolen-verifier";
  }
  return out;
}

inline Json stolen_to_json(const StolenVerifier& leak) {
  Json users = Json::array(), drones = Json::array();
  for (const auto& u : leak.users) users.push_back(user_to_json(u));
  for (const auto& d : leak.drones) drones.push_back(drone_to_json(d));
  return Json{{"version", kFormatVersion},
              {"kind", "stolen-verifier"},
              {"group", std::string(to_string(leak.group))},
              {"users", users},
              {"drones", drones}};
}

using LoadedDatabase = std::variant<ServerDatabase, StolenVerifier>;

inline LoadedDatabase database_from_json(const Json& j) {
  detail::check_header(j, nullptr);
  const std::string kind = detail::text(j, "kind");
  if (kind != "full" && kind != "stolen-verifier") detail::bad("unknown database kind '" + kind + "'");
  GroupId gid = detail::group_id(j);
  const Json& users = detail::field(j, "users");
  const Json& drones = detail::field(j, "drones");
  if (!users.is_array() || !drones.is_array()) detail::bad("'users' and 'drones' must be arrays");

  StolenVerifier tables{gid, {}, {}};
  for (const Json& u : users) {
    tables.users.push_back({detail::identity(u, "id"), detail::digest(u, "fid"), detail::digest(u, "k")});
  }
  for (const Json& d : drones) {
    tables.drones.push_back({detail::identity(d, "id"), detail::digest(d, "pid"), detail::digest(d, "key")});
  }
  if (kind == "stolen-verifier") {
    if (j.contains("s")) detail::bad("stolen-verifier file must not carry 's'");
    return tables;
  }
  ServerDatabase db(gid, detail::scalar(j, "s", group_for(gid)));
  try {
    for (auto& u : tables.users) db.insert(std::move(u));
    for (auto& d : tables.drones) db.insert(std::move(d));
  } catch (const Error& e) {
    detail::bad(std::string("duplicate record: ") + e.what());
  }
  return db;
}

// Party stores ------------------------------------------------------------------

inline Json device_to_json(GroupId group, const MobileDeviceStore& s) {
  Json dir = Json::array();
  for (const auto& e : s.drone_directory) dir.push_back(Json{{"id", e.drone_id.str()}, {"pid", e.pid.hex()}});
  return Json{{"version", kFormatVersion},
              {"kind", "device"},
              {"group", std::string(to_string(group))},
              {"d", s.d.hex()},
              {"f", s.f.hex()},
              {"k", s.k.hex()},
              {"b", s.b.hex()},
              {"drone_directory", dir}};
}

inline MobileDeviceStore device_from_json(const Json& j) {
  detail::check_header(j, "device");
  const Group& g = group_for(detail::group_id(j));
  MobileDeviceStore s{detail::scalar(j, "d", g), detail::scalar(j, "f", g), detail::digest(j, "k"),
                      detail::digest(j, "b"), {}};
  const Json& dir = detail::field(j, "drone_directory");
  if (!dir.is_array()) detail::bad("'drone_directory' must be an array");
  for (const Json& e : dir) s.drone_directory.push_back({detail::identity(e, "id"), detail::digest(e, "pid")});
  return s;
}

inline Json drone_store_to_json(const DroneStore& s) {
  return Json{{"version", kFormatVersion},
              {"kind", "drone"},
              {"id", s.id.str()},
              {"pid", s.pid.hex()},
              {"key", s.key.hex()}};
}

inline DroneStore drone_store_from_json(const Json& j) {
  detail::check_header(j, "drone");
  return {detail::identity(j, "id"), detail::digest(j, "pid"), detail::digest(j, "key")};
}

// Transcript --------------------------------------------------------------------

inline Json message_fields(const Message& m) {
  return std::visit(
      [](const auto& msg) -> Json {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, M1>) {
          return {{"t1", msg.t1.ms}, {"z", msg.z.hex()}, {"a1", msg.a1.hex()}, {"fid", msg.fid.hex()},
                  {"pid", msg.pid.hex()}};
        } else if constexpr (std::is_same_v<T, M2>) {
          return {{"a3", msg.a3.hex()}, {"t2", msg.t2.ms},     {"z", msg.z.hex()},
                  {"pid", msg.pid.hex()}, {"k_ij", msg.k_ij.hex()}, {"fid", msg.fid.hex()}};
        } else {
          return {{"g", msg.g.hex()}, {"t3", msg.t3.ms}, {"auth", msg.auth.hex()}};
        }
      },
      m);
}

inline const char* message_type(const Message& m) {
  static constexpr const char* kNames[] = {"M1", "M2", "M3"};
  return kNames[m.index()];
}

inline Json entry_to_json(const TranscriptEntry& e) {
  return Json{{"direction", std::string(to_string(e.direction))},
              {"sent_at", e.sent_at.ms},
              {"type", message_type(e.message)},
              {"fields", message_fields(e.message)},
              {"ground_truth", e.session_label}};
}

inline Message message_from_json(const std::string& type, const Json& f) {
  using namespace detail;
  if (type == "M1") {
    return M1{Timestamp{number(f, "t1")}, element(f, "z"), digest(f, "a1"), digest(f, "fid"), digest(f, "pid")};
  }
  if (type == "M2") {
    return M2{digest(f, "a3"),  Timestamp{number(f, "t2")}, element(f, "z"),
              digest(f, "pid"), digest(f, "k_ij"),           digest(f, "fid")};
  }
  if (type == "M3") return M3{element(f, "g"), Timestamp{number(f, "t3")}, digest(f, "auth")};
  bad("unknown message type '" + type + "'");
}

inline TranscriptEntry entry_from_json(const Json& j) {
  return {parse_direction(detail::text(j, "direction")),
          message_from_json(detail::text(j, "type"), detail::field(j, "fields")),
          Timestamp{detail::number(j, "sent_at")}, detail::text(j, "ground_truth")};
}

/// The eavesdropper's parse of a line: "ground_truth" is never read.
inline ObservedMessage observed_from_json(const Json& j) {
  return {parse_direction(detail::text(j, "direction")),
          message_from_json(detail::text(j, "type"), detail::field(j, "fields")),
          Timestamp{detail::number(j, "sent_at")}};
}

// Config and reports ------------------------------------------------------------

inline Json config_to_json(const SimConfig& c) {
  return Json{{"seed", c.seed},
              {"group", std::string(to_string(c.group))},
              {"delta_t_ms", c.delta_t_ms},
              {"latency_ms", c.latency_ms}};
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline SimConfig config_from_json(const Json& j, SimConfig base = {}) {
  if (!j.is_object()) detail::bad("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") {
      base.seed = detail::number(j, "seed");
    } else if (key == "group") {
      base.group = detail::group_id(j);
    } else if (key == "delta_t_ms") {
      base.delta_t_ms = detail::number(j, "delta_t_ms");
    } else if (key == "latency_ms") {
      base.latency_ms = detail::number(j, "latency_ms");
    } else {
      detail::bad("unknown config key '" + key + "'");
    }
  }
  return base;
}

inline Json report_to_json(const ScenarioReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.transcript.entries()) entries.push_back(entry_to_json(e));
  return Json{{"version", kFormatVersion},
              {"scenario", r.scenario},
              {"config", config_to_json(r.config)},
              {"verdict", r.verdict},
              {"success", r.success},
              {"checks", r.checks},
              {"details", r.details},
              {"transcript", entries}};
}

inline ScenarioReport report_from_json(const Json& j) {
  detail::check_header(j, nullptr);
  ScenarioReport r;
  r.scenario = detail::text(j, "scenario");
  r.config = config_from_json(detail::field(j, "config"));
  r.verdict = detail::text(j, "verdict");
  const Json& success = detail::field(j, "success");
  if (!success.is_boolean()) detail::bad("'success' must be a boolean");
  r.success = success.get<bool>();
  const Json& checks = detail::field(j, "checks");
  const Json& details = detail::field(j, "details");
  if (!checks.is_object() || !details.is_object()) detail::bad("'checks' and 'details' must be objects");
  for (const auto& [k, v] : checks.items()) {
    if (!v.is_boolean()) detail::bad("check '" + k + "' must be a boolean");
    r.checks[k] = v.get<bool>();
  }
  for (const auto& [k, v] : details.items()) {
    if (!v.is_string()) detail::bad("detail '" + k + "' must be a string");
    r.details[k] = v.get<std::string>();
  }
  const Json& entries = detail::field(j, "transcript");
  if (!entries.is_array()) detail::bad("'transcript' must be an array");
  for (const Json& e : entries) r.transcript.append(entry_from_json(e));
  return r;
}

}  // namespace iodlab::persist

#endif  // IODLAB_PERSISTENCE_CODEC_HPP
