// include/voxeval/service/config.hpp

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

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "voxeval/verification.hpp"

namespace voxeval::service {

using Timestamp = std::chrono::sys_seconds;

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view text);

enum class Task { verification, diarisation };
enum class PhaseKind { challenge, permanent };

std::string_view task_name(Task t);
std::string_view phase_name(PhaseKind p);
PhaseKind parse_phase(std::string_view name);

struct TrackConfig {
  std::string track_id;
  Task task = Task::verification;
  // Labelled trial list (verification) or reference RTTM (diarisation).
  std::filesystem::path reference;
  DcfParams dcf;
  double collar = 0.25;
  std::size_t quota_total = 10;
  std::size_t quota_per_day = 1;
  // Quotas after the switch to the permanent phase; default to the above.
  std::optional<std::size_t> permanent_quota_total;
  std::optional<std::size_t> permanent_quota_per_day;
  std::optional<Timestamp> challenge_deadline;

  std::string_view primary_metric() const { return task == Task::verification ? "min_dcf" : "der"; }
  std::string_view secondary_metric() const { return task == Task::verification ? "eer" : "jer"; }
  std::size_t total_quota(PhaseKind p) const;
  std::size_t daily_quota(PhaseKind p) const;
};

struct TeamConfig {
  std::string team_id;
  std::string token;
};

struct ServiceConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::filesystem::path data_dir = "voxeval-data";
  // Calendar days for the daily quota are counted in this fixed UTC offset.
  int utc_offset_minutes = 0;
  std::string admin_token;
  std::vector<TeamConfig> teams;
  std::vector<TrackConfig> tracks;
};

// Relative paths in `json` resolve against `base_dir`.
TrackConfig track_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json track_to_json(const TrackConfig& track);

ServiceConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
// Reads the file, then applies VOXEVAL_LISTEN ("host:port") and
// VOXEVAL_DATA_DIR from the environment.
ServiceConfig load_config(const std::filesystem::path& path);

// "UTC", "Z", or a fixed offset like "+08:00" / "-05:30".
int parse_utc_offset(std::string_view tz);

}  // namespace voxeval::service
