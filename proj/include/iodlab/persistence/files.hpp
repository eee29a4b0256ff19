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

#ifndef IODLAB_PERSISTENCE_FILES_HPP
#define IODLAB_PERSISTENCE_FILES_HPP

#include <fstream>
#include <sstream>
#include <string>

#include "iodlab/persistence/codec.hpp"

namespace iodlab::persist {

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::io, "read failed on '" + path + "'");
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorKind::io, "write failed on '" + path + "'");
}

inline Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::format, origin + ": " + e.what());
  }
}

/// Pretty-printed, sorted keys, trailing newline.
inline std::string canonical(const Json& j) { return j.dump(2) + "\n"; }

template <class T, class F>
T decode_file(const std::string& path, F&& decode) {
  Json j = parse_json(read_text(path), path);
  try {
    return decode(j);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::format, path + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_argument) throw Error(ErrorKind::format, path + ": " + e.what());
    throw;
  }
}

inline void save_database(const ServerDatabase& db, const std::string& path,
                          DatabaseExport mode = DatabaseExport::full) {
  write_text(path, canonical(database_to_json(db, mode)));
}

inline void save_stolen_verifier(const StolenVerifier& leak, const std::string& path) {
  write_text(path, canonical(stolen_to_json(leak)));
}

inline LoadedDatabase load_database(const std::string& path) {
  return decode_file<LoadedDatabase>(path, [](const Json& j) { return database_from_json(j); });
}

/// Either file variant yields the leaked tables; a full file is stripped of s.
inline StolenVerifier load_stolen_verifier(const std::string& path) {
  LoadedDatabase loaded = load_database(path);
  if (auto* db = std::get_if<ServerDatabase>(&loaded)) return steal_verifier(*db);
  return std::get<StolenVerifier>(std::move(loaded));
}

inline ServerDatabase load_server_database(const std::string& path) {
  LoadedDatabase loaded = load_database(path);
  if (auto* db = std::get_if<ServerDatabase>(&loaded)) return std::move(*db);
  throw Error(ErrorKind::format, path + ": stolen-verifier export has no server secret");
}

inline void save_device(GroupId group, const MobileDeviceStore& store, const std::string& path) {
  write_text(path, canonical(device_to_json(group, store)));
}

inline MobileDeviceStore load_device(const std::string& path) {
  return decode_file<MobileDeviceStore>(path, [](const Json& j) { return device_from_json(j); });
}

inline GroupId load_device_group(const std::string& path) {
  return decode_file<GroupId>(path, [](const Json& j) { return detail::group_id(j); });
}

inline void save_drone(const DroneStore& store, const std::string& path) {
  write_text(path, canonical(drone_store_to_json(store)));
}

inline DroneStore load_drone(const std::string& path) {
  return decode_file<DroneStore>(path, [](const Json& j) { return drone_store_from_json(j); });
}

/// JSON lines, one entry per line, in send order.
inline std::string transcript_to_jsonl(const Transcript& t) {
  std::string out;
  for (const auto& e : t.entries()) out += entry_to_json(e).dump() + "\n";
  return out;
}

inline void export_transcript(const Transcript& t, const std::string& path) {
  write_text(path, transcript_to_jsonl(t));
}

namespace detail {

template <class F>
void for_each_line(const std::string& path, F&& f) {
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    Json j = parse_json(line, path + ":" + std::to_string(n));
    try {
      f(j);
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::format, path + ":" + std::to_string(n) + ": " + e.what());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::invalid_argument) {
        throw Error(ErrorKind::format, path + ":" + std::to_string(n) + ": " + e.what());
      }
      throw;
    }
  }
}

}  // namespace detail

inline Transcript import_transcript(const std::string& path) {
  Transcript t;
  detail::for_each_line(path, [&](const Json& j) { t.append(entry_from_json(j)); });
  return t;
}

/// What a network observer reconstructs from the capture file: no labels.
inline AdversaryView import_adversary_view(const std::string& path) {
  AdversaryView view;
  detail::for_each_line(path, [&](const Json& j) { view.push_back(observed_from_json(j)); });
  return view;
}

inline SimConfig load_config(const std::string& path, SimConfig base = {}) {
  return decode_file<SimConfig>(path, [&](const Json& j) { return config_from_json(j, base); });
}

inline void save_report(const ScenarioReport& r, const std::string& path) {
  write_text(path, canonical(report_to_json(r)));
}

inline ScenarioReport load_report(const std::string& path) {
  return decode_file<ScenarioReport>(path, [](const Json& j) { return report_from_json(j); });
}

}  // namespace iodlab::persist

#endif  // IODLAB_PERSISTENCE_FILES_HPP
