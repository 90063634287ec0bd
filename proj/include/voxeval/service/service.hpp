// include/voxeval/service/service.hpp

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

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "voxeval/rttm.hpp"
#include "voxeval/service/config.hpp"
#include "voxeval/service/store.hpp"
#include "voxeval/trials.hpp"

namespace voxeval::service {

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class UnauthorizedError : public Error {
 public:
  using Error::Error;
};

// The daily or total submission allowance is used up.
class QuotaExceededError : public Error {
 public:
  enum class Window { daily, total };
  QuotaExceededError(Window window, std::optional<Timestamp> resets_at, const std::string& message)
      : Error(message), window_(window), resets_at_(resets_at) {}
  Window window() const { return window_; }
  std::optional<Timestamp> resets_at() const { return resets_at_; }

 private:
  Window window_;
  std::optional<Timestamp> resets_at_;
};

// Submissions are closed: the challenge deadline passed and the permanent
// phase has not been opened yet.
class PhaseClosedError : public Error {
 public:
  using Error::Error;
};

using MetricValues = std::map<std::string, double>;

struct Phase {
  PhaseKind current = PhaseKind::challenge;
  std::optional<Timestamp> challenge_deadline;  // cleared once permanent
  std::optional<Timestamp> transitioned_at;
};

struct PhaseTransition {
  Phase phase;
  bool no_op = false;
};

enum class SubmissionStatus { accepted, rejected };

struct SubmissionRecord {
  std::string submission_id;
  std::string team_id;
  std::string track_id;
  Timestamp received_at{};
  PhaseKind phase_at_receipt = PhaseKind::challenge;
  std::string payload_digest;
  std::string reference_digest;
  SubmissionStatus status = SubmissionStatus::accepted;
  std::string reason;
  std::vector<std::string> findings;
  MetricValues metrics;
};

nlohmann::json to_json(const SubmissionRecord& r);
SubmissionRecord record_from_json(const nlohmann::json& j);

struct LeaderboardEntry {
  std::string team_id;
  std::string submission_id;
  Timestamp achieved_at{};
  PhaseKind phase_of_submission = PhaseKind::challenge;
  MetricValues metrics;
};

nlohmann::json leaderboard_to_json(const std::vector<LeaderboardEntry>& board);

// Result of format validation plus metric computation for one payload.
struct Evaluation {
  bool accepted = false;
  std::string reason;
  std::vector<std::string> findings;
  MetricValues metrics;
};

// Reference data of one track, validated when loaded.
struct LoadedTrack {
  TrackConfig config;
  std::string reference_digest;
  std::variant<std::vector<TrialPair>, AnnotationSet> reference;
};

// Parses and validates the track's reference file. ConfigError naming the
// track on any failure.
LoadedTrack load_track(const TrackConfig& config);

Evaluation evaluate_payload(const LoadedTrack& track, std::string_view payload);

// Submission server state machine: quotas, phases, evaluation and the
// leaderboard. State lives in a SubmissionStore and is rebuilt from its log
// on construction.
class ChallengeService {
 public:
  using Logger = std::function<void(const std::string&)>;

  explicit ChallengeService(ServiceConfig config, Logger logger = {});

  const ServiceConfig& config() const { return config_; }

  // Team id for a registered token.
  std::optional<std::string> team_for_token(const std::string& token) const;

  SubmissionRecord submit(const std::string& team_id, const std::string& track_id,
                          std::string_view payload, Timestamp now);

  std::vector<LeaderboardEntry> leaderboard(const std::string& track_id, PhaseKind phase) const;

  PhaseTransition transition_phase(const std::string& track_id, Timestamp now,
                                   bool override_deadline = false);
  Phase phase(const std::string& track_id) const;

  // Recomputes metrics from the stored payload; IntegrityError when the
  // payload or the track's reference file no longer match their digests.
  MetricValues reevaluate(const std::string& submission_id) const;

  SubmissionRecord submission(const std::string& submission_id) const;
  std::vector<SubmissionRecord> submissions() const;

  // Opens a new track at runtime; recorded in the log.
  void add_track(const TrackConfig& track, Timestamp now);
  std::vector<std::string> track_ids() const;

 private:
  struct TrackState {
    std::shared_ptr<const LoadedTrack> loaded;
    Phase phase;
  };

  void apply(const nlohmann::json& event);
  void apply_record(SubmissionRecord record);
  const TrackState& track_state(const std::string& track_id) const;
  std::mutex& team_mutex(const std::string& team_id) const;
  std::int64_t local_day(Timestamp t) const;
  Timestamp next_local_midnight(Timestamp t) const;
  void log(const std::string& line) const;

  ServiceConfig config_;
  Logger logger_;
  SubmissionStore store_;

  mutable std::shared_mutex state_mutex_;
  std::map<std::string, TrackState> tracks_;
  std::vector<SubmissionRecord> records_;
  std::map<std::string, std::size_t> record_index_;
  std::uint64_t next_id_ = 1;

  std::map<std::string, std::string> token_to_team_;
  mutable std::map<std::string, std::unique_ptr<std::mutex>> team_mutexes_;
};

}  // namespace voxeval::service
