// src/service/config.cpp

// Copyright 2026  The voxeval Authors

// See LICENSE for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "voxeval/service/config.hpp"

#include <cstdio>
#include <cstdlib>

#include <fmt/format.h>

#include "voxeval/errors.hpp"
#include "voxeval/text.hpp"

namespace voxeval::service {

using nlohmann::json;
namespace chrono = std::chrono;

std::string format_timestamp(Timestamp t) {
  const auto day = chrono::floor<chrono::days>(t);
  const chrono::year_month_day ymd{day};
  const chrono::hh_mm_ss hms{t - day};
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

Timestamp parse_timestamp(std::string_view text) {
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char tail = 0;
  const std::string buf(text);
  if (std::sscanf(buf.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%c", &y, &mo, &d, &h, &mi, &s, &tail) != 7 ||
      tail != 'Z' || buf.size() != 20) {
    throw ConfigError(fmt::format("bad timestamp '{}' (expected YYYY-MM-DDTHH:MM:SSZ)", text));
  }
  const chrono::year_month_day ymd{chrono::year{y}, chrono::month{mo}, chrono::day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw ConfigError(fmt::format("bad timestamp '{}'", text));
  }
  return chrono::sys_days{ymd} + chrono::hours{h} + chrono::minutes{mi} + chrono::seconds{s};
}

std::string_view task_name(Task t) {
  return t == Task::verification ? "verification" : "diarisation";
}

std::string_view phase_name(PhaseKind p) { return p == PhaseKind::challenge ? "challenge" : "permanent"; }

PhaseKind parse_phase(std::string_view name) {
  if (name == "challenge") return PhaseKind::challenge;
  if (name == "permanent") return PhaseKind::permanent;
  throw ArgumentError(fmt::format("unknown phase '{}'", name));
}

std::size_t TrackConfig::total_quota(PhaseKind p) const {
  return p == PhaseKind::permanent ? permanent_quota_total.value_or(quota_total) : quota_total;
}

std::size_t TrackConfig::daily_quota(PhaseKind p) const {
  return p == PhaseKind::permanent ? permanent_quota_per_day.value_or(quota_per_day) : quota_per_day;
}

int parse_utc_offset(std::string_view tz) {
  if (tz == "UTC" || tz == "Z" || tz == "utc") return 0;
  unsigned h = 0, m = 0;
  const std::string buf(tz);
  if (buf.size() == 6 && (buf[0] == '+' || buf[0] == '-') && buf[3] == ':' &&
      std::sscanf(buf.c_str() + 1, "%2u:%2u", &h, &m) == 2 && h <= 14 && m < 60) {
    const int minutes = static_cast<int>(h * 60 + m);
    return buf[0] == '-' ? -minutes : minutes;
  }
  throw ConfigError(fmt::format("unsupported timezone '{}' (use UTC or +HH:MM)", tz));
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

std::pair<std::string, int> parse_listen(std::string_view s) {
  const auto colon = s.rfind(':');
  if (colon == std::string_view::npos) throw ConfigError(fmt::format("bad listen address '{}'", s));
  auto port = parse_int(s.substr(colon + 1));
  if (!port || *port < 0 || *port > 65535) {
    throw ConfigError(fmt::format("bad port in listen address '{}'", s));
  }
  return {std::string(s.substr(0, colon)), static_cast<int>(*port)};
}

}  // namespace

TrackConfig track_from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    TrackConfig t;
    t.track_id = j.at("track_id").get<std::string>();
    if (t.track_id.empty()) throw ConfigError("track_id must not be empty");
    const auto task = j.at("task").get<std::string>();
    if (task == "verification") {
      t.task = Task::verification;
    } else if (task == "diarisation" || task == "diarization") {
      t.task = Task::diarisation;
    } else {
      throw ConfigError(fmt::format("track '{}': unknown task '{}'", t.track_id, task));
    }
    std::filesystem::path ref = j.at("reference").get<std::string>();
    t.reference = ref.is_absolute() ? ref : base_dir / ref;
    if (j.contains("primary_metric") && j.at("primary_metric").get<std::string>() != t.primary_metric()) {
      throw ConfigError(fmt::format("track '{}': primary metric for {} is {}", t.track_id, task,
                                    t.primary_metric()));
    }
    if (j.contains("dcf")) {
      const auto& d = j.at("dcf");
      t.dcf.c_miss = get_or(d, "c_miss", t.dcf.c_miss);
      t.dcf.c_fa = get_or(d, "c_fa", t.dcf.c_fa);
      t.dcf.p_tar = get_or(d, "p_tar", t.dcf.p_tar);
    }
    if (!(t.dcf.c_miss > 0 && t.dcf.c_fa > 0 && t.dcf.p_tar > 0 && t.dcf.p_tar < 1)) {
      throw ConfigError(fmt::format("track '{}': invalid DCF parameters", t.track_id));
    }
    t.collar = get_or(j, "collar", t.collar);
    if (!(t.collar >= 0)) throw ConfigError(fmt::format("track '{}': negative collar", t.track_id));
    t.quota_total = get_or(j, "quota_total", t.quota_total);
    t.quota_per_day = get_or(j, "quota_per_day", t.quota_per_day);
    if (j.contains("permanent_quota_total")) t.permanent_quota_total = j.at("permanent_quota_total").get<std::size_t>();
    if (j.contains("permanent_quota_per_day")) t.permanent_quota_per_day = j.at("permanent_quota_per_day").get<std::size_t>();
    if (j.contains("challenge_deadline") && !j.at("challenge_deadline").is_null()) {
      t.challenge_deadline = parse_timestamp(j.at("challenge_deadline").get<std::string>());
    }
    return t;
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("bad track configuration: {}", e.what()));
  }
}

json track_to_json(const TrackConfig& t) {
  json j = {{"track_id", t.track_id},
            {"task", task_name(t.task)},
            {"reference", t.reference.string()},
            {"primary_metric", t.primary_metric()},
            {"dcf", {{"c_miss", t.dcf.c_miss}, {"c_fa", t.dcf.c_fa}, {"p_tar", t.dcf.p_tar}}},
            {"collar", t.collar},
            {"quota_total", t.quota_total},
            {"quota_per_day", t.quota_per_day}};
  if (t.permanent_quota_total) j["permanent_quota_total"] = *t.permanent_quota_total;
  if (t.permanent_quota_per_day) j["permanent_quota_per_day"] = *t.permanent_quota_per_day;
  if (t.challenge_deadline) j["challenge_deadline"] = format_timestamp(*t.challenge_deadline);
  return j;
}

ServiceConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  ServiceConfig c;
  try {
    if (j.contains("listen")) std::tie(c.listen_host, c.listen_port) = parse_listen(j.at("listen").get<std::string>());
    if (j.contains("data_dir")) {
      std::filesystem::path d = j.at("data_dir").get<std::string>();
      c.data_dir = d.is_absolute() ? d : base_dir / d;
    } else {
      c.data_dir = base_dir / c.data_dir;
    }
    c.utc_offset_minutes = parse_utc_offset(get_or<std::string>(j, "timezone", "UTC"));
    c.admin_token = get_or<std::string>(j, "admin_token", "");
    for (const auto& t : j.value("teams", json::array())) {
      TeamConfig team{t.at("team_id").get<std::string>(), t.at("token").get<std::string>()};
      if (team.team_id.empty() || team.token.empty()) throw ConfigError("team id and token must be non-empty");
      c.teams.push_back(std::move(team));
    }
    for (const auto& t : j.value("tracks", json::array())) c.tracks.push_back(track_from_json(t, base_dir));
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("bad configuration: {}", e.what()));
  }
  return c;
}

ServiceConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  ServiceConfig c = parse_config(text, path.parent_path());
  if (const char* listen = std::getenv("VOXEVAL_LISTEN"); listen && *listen) {
    std::tie(c.listen_host, c.listen_port) = parse_listen(listen);
  }
  if (const char* dir = std::getenv("VOXEVAL_DATA_DIR"); dir && *dir) c.data_dir = dir;
  return c;
}

}  // namespace voxeval::service
