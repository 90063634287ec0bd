// src/service/service.cpp

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

#include "voxeval/service/service.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#include "voxeval/diarisation.hpp"
#include "voxeval/text.hpp"
#include "voxeval/verification.hpp"

namespace voxeval::service {

using nlohmann::json;
namespace chrono = std::chrono;

namespace {

std::string_view status_name(SubmissionStatus s) {
  return s == SubmissionStatus::accepted ? "accepted" : "rejected";
}

Evaluation rejected(std::string reason, std::vector<std::string> findings) {
  Evaluation e;
  e.reason = std::move(reason);
  e.findings = std::move(findings);
  return e;
}

}  // namespace

json to_json(const SubmissionRecord& r) {
  return {{"submission_id", r.submission_id},
          {"team_id", r.team_id},
          {"track_id", r.track_id},
          {"received_at", format_timestamp(r.received_at)},
          {"phase", phase_name(r.phase_at_receipt)},
          {"payload_digest", r.payload_digest},
          {"reference_digest", r.reference_digest},
          {"status", status_name(r.status)},
          {"reason", r.reason},
          {"findings", r.findings},
          {"metrics", r.metrics}};
}

SubmissionRecord record_from_json(const json& j) {
  SubmissionRecord r;
  r.submission_id = j.at("submission_id").get<std::string>();
  r.team_id = j.at("team_id").get<std::string>();
  r.track_id = j.at("track_id").get<std::string>();
  r.received_at = parse_timestamp(j.at("received_at").get<std::string>());
  r.phase_at_receipt = parse_phase(j.at("phase").get<std::string>());
  r.payload_digest = j.at("payload_digest").get<std::string>();
  r.reference_digest = j.at("reference_digest").get<std::string>();
  r.status = j.at("status").get<std::string>() == "accepted" ? SubmissionStatus::accepted
                                                             : SubmissionStatus::rejected;
  r.reason = j.value("reason", "");
  r.findings = j.value("findings", std::vector<std::string>{});
  r.metrics = j.value("metrics", MetricValues{});
  return r;
}

json leaderboard_to_json(const std::vector<LeaderboardEntry>& board) {
  json out = json::array();
  for (std::size_t i = 0; i < board.size(); ++i) {
    const auto& e = board[i];
    out.push_back({{"rank", i + 1},
                   {"team_id", e.team_id},
                   {"submission_id", e.submission_id},
                   {"achieved_at", format_timestamp(e.achieved_at)},
                   {"phase", phase_name(e.phase_of_submission)},
                   {"metrics", e.metrics}});
  }
  return out;
}

LoadedTrack load_track(const TrackConfig& config) {
  LoadedTrack t;
  t.config = config;
  std::string text;
  try {
    text = read_text_file(config.reference);
  } catch (const Error& e) {
    throw ConfigError(fmt::format("track '{}': reference data unavailable: {}", config.track_id, e.what()));
  }
  t.reference_digest = sha256_hex(text);
  try {
    if (config.task == Task::verification) {
      auto trials = parse_trial_list(text, /*expect_labels=*/true);
      const auto targets = std::count_if(trials.begin(), trials.end(), [](const TrialPair& p) { return *p.label; });
      if (targets == 0 || static_cast<std::size_t>(targets) == trials.size()) {
        throw ValidationError("reference trial list needs both target and nontarget trials");
      }
      t.reference = std::move(trials);
    } else {
      auto refs = parse_rttm(text);
      if (refs.empty()) throw ValidationError("reference RTTM has no turns");
      t.reference = std::move(refs);
    }
  } catch (const Error& e) {
    throw ConfigError(fmt::format("track '{}': invalid reference {}: {}", config.track_id,
                                  config.reference.string(), e.what()));
  }
  return t;
}

Evaluation evaluate_payload(const LoadedTrack& track, std::string_view payload) {
  if (const auto* trials = std::get_if<std::vector<TrialPair>>(&track.reference)) {
    std::vector<ScoreRecord> scores;
    try {
      scores = parse_score_file(payload);
    } catch (const ParseError& e) {
      return rejected("score file does not parse", {e.what()});
    }
    std::vector<ScoredTrial> scored;
    try {
      scored = join_scores(*trials, scores);
    } catch (const SubmissionInvalidError& e) {
      return rejected(e.what(), e.findings());
    }
    const ErrorProfile profile = error_profile(scored);
    Evaluation ev;
    ev.accepted = true;
    ev.metrics = {{"eer", eer(profile)}, {"min_dcf", min_dcf(profile, track.config.dcf).value}};
    return ev;
  }

  const auto& refs = std::get<AnnotationSet>(track.reference);
  AnnotationSet hyps;
  try {
    hyps = parse_rttm(payload);
  } catch (const ParseError& e) {
    return rejected("RTTM does not parse", {e.what()});
  }
  try {
    const DiarisationReport report = score_diarisation(refs, hyps, track.config.collar);
    if (std::isnan(report.corpus_der.der) || std::isnan(report.corpus_jer)) {
      return rejected("reference has no scored speech", {});
    }
    Evaluation ev;
    ev.accepted = true;
    ev.metrics = {{"der", report.corpus_der.der}, {"jer", report.corpus_jer}};
    return ev;
  } catch (const ValidationError& e) {
    return rejected(e.what(), e.findings());
  }
}

ChallengeService::ChallengeService(ServiceConfig config, Logger logger)
    : config_(std::move(config)), logger_(std::move(logger)), store_(config_.data_dir) {
  for (const auto& team : config_.teams) {
    if (!token_to_team_.emplace(team.token, team.team_id).second) {
      throw ConfigError(fmt::format("token of team '{}' is not unique", team.team_id));
    }
    team_mutexes_.emplace(team.team_id, std::make_unique<std::mutex>());
  }
  for (const auto& track : config_.tracks) {
    if (tracks_.contains(track.track_id)) {
      throw ConfigError(fmt::format("duplicate track '{}'", track.track_id));
    }
    tracks_[track.track_id] = {std::make_shared<const LoadedTrack>(load_track(track)),
                               Phase{PhaseKind::challenge, track.challenge_deadline, std::nullopt}};
  }
  for (const auto& event : store_.read_log()) apply(event);
}

void ChallengeService::log(const std::string& line) const {
  if (logger_) logger_(line);
}

void ChallengeService::apply(const json& event) {
  const auto kind = event.at("event").get<std::string>();
  if (kind == "submission") {
    apply_record(record_from_json(event.at("record")));
  } else if (kind == "phase") {
    auto& st = tracks_.at(event.at("track_id").get<std::string>());
    st.phase.current = PhaseKind::permanent;
    st.phase.challenge_deadline.reset();
    st.phase.transitioned_at = parse_timestamp(event.at("at").get<std::string>());
  } else if (kind == "track") {
    const TrackConfig cfg = track_from_json(event.at("track"), {});
    if (!tracks_.contains(cfg.track_id)) {
      tracks_[cfg.track_id] = {std::make_shared<const LoadedTrack>(load_track(cfg)),
                               Phase{PhaseKind::challenge, cfg.challenge_deadline, std::nullopt}};
    }
  } else {
    throw IntegrityError(fmt::format("unknown log event '{}'", kind));
  }
}

void ChallengeService::apply_record(SubmissionRecord record) {
  unsigned long long n = 0;
  if (std::sscanf(record.submission_id.c_str(), "sub-%llu", &n) == 1) {
    next_id_ = std::max<std::uint64_t>(next_id_, n + 1);
  }
  record_index_[record.submission_id] = records_.size();
  records_.push_back(std::move(record));
}

std::optional<std::string> ChallengeService::team_for_token(const std::string& token) const {
  if (auto it = token_to_team_.find(token); it != token_to_team_.end()) return it->second;
  return std::nullopt;
}

const ChallengeService::TrackState& ChallengeService::track_state(const std::string& track_id) const {
  auto it = tracks_.find(track_id);
  if (it == tracks_.end()) throw NotFoundError(fmt::format("unknown track '{}'", track_id));
  return it->second;
}

std::mutex& ChallengeService::team_mutex(const std::string& team_id) const {
  auto it = team_mutexes_.find(team_id);
  if (it == team_mutexes_.end()) throw UnauthorizedError(fmt::format("unknown team '{}'", team_id));
  return *it->second;
}

std::int64_t ChallengeService::local_day(Timestamp t) const {
  const auto local = t + chrono::minutes(config_.utc_offset_minutes);
  return chrono::floor<chrono::days>(local).time_since_epoch().count();
}

Timestamp ChallengeService::next_local_midnight(Timestamp t) const {
  const chrono::sys_days next{chrono::days(local_day(t) + 1)};
  return chrono::time_point_cast<chrono::seconds>(next) - chrono::minutes(config_.utc_offset_minutes);
}

SubmissionRecord ChallengeService::submit(const std::string& team_id, const std::string& track_id,
                                          std::string_view payload, Timestamp now) {
  std::lock_guard team_lock(team_mutex(team_id));

  TrackState track;
  std::size_t today = 0;
  std::size_t in_phase = 0;
  {
    std::shared_lock lock(state_mutex_);
    track = track_state(track_id);
    const PhaseKind phase = track.phase.current;
    if (phase == PhaseKind::challenge && track.phase.challenge_deadline &&
        now >= *track.phase.challenge_deadline) {
      throw PhaseClosedError(fmt::format("track '{}': challenge phase closed at {}; permanent phase not open yet",
                                         track_id, format_timestamp(*track.phase.challenge_deadline)));
    }
    if (phase == PhaseKind::permanent && track.phase.transitioned_at && now < *track.phase.transitioned_at) {
      throw ArgumentError("submission time precedes the phase transition");
    }
    const auto day = local_day(now);
    for (const auto& r : records_) {
      if (r.team_id != team_id || r.track_id != track_id || r.phase_at_receipt != phase) continue;
      ++in_phase;
      if (local_day(r.received_at) == day) ++today;
    }
  }
  const PhaseKind phase = track.phase.current;
  const TrackConfig& cfg = track.loaded->config;
  if (today >= cfg.daily_quota(phase)) {
    const Timestamp reset = next_local_midnight(now);
    log(fmt::format("{} {} {}: rejected, daily quota", format_timestamp(now), team_id, track_id));
    throw QuotaExceededError(QuotaExceededError::Window::daily, reset,
                             fmt::format("daily quota of {} submission(s) used; resets at {}",
                                         cfg.daily_quota(phase), format_timestamp(reset)));
  }
  if (in_phase >= cfg.total_quota(phase)) {
    log(fmt::format("{} {} {}: rejected, total quota", format_timestamp(now), team_id, track_id));
    throw QuotaExceededError(
        QuotaExceededError::Window::total, std::nullopt,
        fmt::format("total quota of {} submission(s) for the {} phase used; {}", cfg.total_quota(phase),
                    phase_name(phase),
                    phase == PhaseKind::challenge ? "resets when the permanent phase opens" : "does not reset"));
  }

  const Evaluation ev = evaluate_payload(*track.loaded, payload);

  SubmissionRecord record;
  record.team_id = team_id;
  record.track_id = track_id;
  record.received_at = now;
  record.phase_at_receipt = phase;
  record.payload_digest = store_.put_payload(payload);
  record.reference_digest = track.loaded->reference_digest;
  record.status = ev.accepted ? SubmissionStatus::accepted : SubmissionStatus::rejected;
  record.reason = ev.reason;
  record.findings = ev.findings;
  record.metrics = ev.metrics;
  {
    std::unique_lock lock(state_mutex_);
    record.submission_id = fmt::format("sub-{:06}", next_id_++);
    store_.append({{"event", "submission"}, {"record", to_json(record)}});
    apply_record(record);
  }
  log(fmt::format("{} {} {} {}: {}{}", format_timestamp(now), team_id, track_id, record.submission_id,
                  status_name(record.status), ev.accepted ? "" : " (" + ev.reason + ")"));
  return record;
}

std::vector<LeaderboardEntry> ChallengeService::leaderboard(const std::string& track_id,
                                                            PhaseKind phase) const {
  std::shared_lock lock(state_mutex_);
  const TrackConfig& cfg = track_state(track_id).loaded->config;
  const std::string primary(cfg.primary_metric());
  const std::string secondary(cfg.secondary_metric());
  auto key = [&](const SubmissionRecord& r) {
    return std::make_tuple(r.metrics.at(primary), r.metrics.at(secondary), r.received_at, r.submission_id);
  };

  std::map<std::string, const SubmissionRecord*> best;
  for (const auto& r : records_) {
    if (r.track_id != track_id || r.status != SubmissionStatus::accepted) continue;
    // The permanent board also carries the challenge-phase results.
    if (phase == PhaseKind::challenge && r.phase_at_receipt != PhaseKind::challenge) continue;
    auto& slot = best[r.team_id];
    if (!slot || key(r) < key(*slot)) slot = &r;
  }
  std::vector<const SubmissionRecord*> ranked;
  for (const auto& [_, r] : best) ranked.push_back(r);
  std::sort(ranked.begin(), ranked.end(), [&](const SubmissionRecord* a, const SubmissionRecord* b) {
    return std::tuple_cat(key(*a), std::tie(a->team_id)) < std::tuple_cat(key(*b), std::tie(b->team_id));
  });
  std::vector<LeaderboardEntry> out;
  for (const auto* r : ranked) {
    out.push_back({r->team_id, r->submission_id, r->received_at, r->phase_at_receipt, r->metrics});
  }
  return out;
}

PhaseTransition ChallengeService::transition_phase(const std::string& track_id, Timestamp now,
                                                   bool override_deadline) {
  std::unique_lock lock(state_mutex_);
  track_state(track_id);
  TrackState& st = tracks_.at(track_id);
  if (st.phase.current == PhaseKind::permanent) return {st.phase, true};
  const auto& deadline = st.phase.challenge_deadline;
  if (!override_deadline && (!deadline || now < *deadline)) {
    throw ArgumentError(fmt::format("track '{}': challenge deadline {} not reached", track_id,
                                    deadline ? format_timestamp(*deadline) : std::string("(none)")));
  }
  const json event = {{"event", "phase"}, {"track_id", track_id}, {"at", format_timestamp(now)},
                      {"override", override_deadline}};
  store_.append(event);
  apply(event);
  log(fmt::format("{} {}: permanent phase opened", format_timestamp(now), track_id));
  return {st.phase, false};
}

Phase ChallengeService::phase(const std::string& track_id) const {
  std::shared_lock lock(state_mutex_);
  return track_state(track_id).phase;
}

SubmissionRecord ChallengeService::submission(const std::string& submission_id) const {
  std::shared_lock lock(state_mutex_);
  auto it = record_index_.find(submission_id);
  if (it == record_index_.end()) throw NotFoundError(fmt::format("unknown submission '{}'", submission_id));
  return records_[it->second];
}

std::vector<SubmissionRecord> ChallengeService::submissions() const {
  std::shared_lock lock(state_mutex_);
  return records_;
}

MetricValues ChallengeService::reevaluate(const std::string& submission_id) const {
  const SubmissionRecord record = submission(submission_id);
  TrackConfig cfg;
  {
    std::shared_lock lock(state_mutex_);
    cfg = track_state(record.track_id).loaded->config;
  }
  const std::string payload = store_.get_payload(record.payload_digest);
  std::string reference;
  try {
    reference = read_text_file(cfg.reference);
  } catch (const Error& e) {
    throw IntegrityError(fmt::format("reference of track '{}' unavailable: {}", cfg.track_id, e.what()));
  }
  if (sha256_hex(reference) != record.reference_digest) {
    throw IntegrityError(fmt::format("reference of track '{}' changed since {} was scored", cfg.track_id,
                                     submission_id));
  }
  return evaluate_payload(load_track(cfg), payload).metrics;
}

void ChallengeService::add_track(const TrackConfig& track, Timestamp now) {
  auto loaded = std::make_shared<const LoadedTrack>(load_track(track));
  std::unique_lock lock(state_mutex_);
  if (tracks_.contains(track.track_id)) throw ArgumentError(fmt::format("track '{}' exists", track.track_id));
  store_.append({{"event", "track"}, {"at", format_timestamp(now)}, {"track", track_to_json(track)}});
  tracks_[track.track_id] = {std::move(loaded), Phase{PhaseKind::challenge, track.challenge_deadline, std::nullopt}};
}

std::vector<std::string> ChallengeService::track_ids() const {
  std::shared_lock lock(state_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : tracks_) ids.push_back(id);
  return ids;
}

}  // namespace voxeval::service
