// tests/service_test.cpp

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

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "httplib.h"
#include "service_fixture.hpp"
#include "voxeval/rttm.hpp"
#include "voxeval/service/http.hpp"
#include "voxeval/text.hpp"

using namespace voxeval;
using namespace voxeval::service;
using fixture::at;

namespace {

class ServiceTest : public ::testing::Test {
 protected:
  fixture::TempDir dir;
  ServiceConfig cfg = fixture::verification_config(dir.path());
  std::vector<TrialPair> trials = fixture::small_trials();
  fixture::RankedScores scores = fixture::ranked_scores();

  std::string payload(const std::vector<double>& s) const { return fixture::score_payload(trials, s); }
};

std::string board_dump(const ChallengeService& svc, PhaseKind phase) {
  return leaderboard_to_json(svc.leaderboard("sv", phase)).dump();
}

}  // namespace

TEST_F(ServiceTest, AcceptedSubmissionCarriesMetrics) {
  ChallengeService svc(cfg);
  const auto r = svc.submit("alpha", "sv", payload(scores.tie_low), at(0));
  EXPECT_EQ(r.status, SubmissionStatus::accepted);
  EXPECT_EQ(r.submission_id, "sub-000001");
  EXPECT_EQ(r.phase_at_receipt, PhaseKind::challenge);
  const auto profile = fixture::profile_of(trials, scores.tie_low);
  EXPECT_EQ(r.metrics.at("eer"), eer(profile));
  EXPECT_EQ(r.metrics.at("min_dcf"), min_dcf(profile, DcfParams{}).value);
  EXPECT_EQ(r.payload_digest, sha256_hex(payload(scores.tie_low)));
}

TEST_F(ServiceTest, SecondSameDaySubmissionIsQuotaRejected) {
  ChallengeService svc(cfg);
  svc.submit("alpha", "sv", payload(scores.best), at(0, 1));
  try {
    svc.submit("alpha", "sv", payload(scores.best), at(0, 23, 59));
    FAIL() << "expected quota rejection";
  } catch (const QuotaExceededError& e) {
    EXPECT_EQ(e.window(), QuotaExceededError::Window::daily);
    EXPECT_EQ(e.resets_at(), at(1, 0));
  }
  EXPECT_EQ(svc.submissions().size(), 1u);
  // Other teams and the next day are unaffected.
  EXPECT_NO_THROW(svc.submit("beta", "sv", payload(scores.best), at(0, 2)));
  EXPECT_NO_THROW(svc.submit("alpha", "sv", payload(scores.best), at(1, 0)));
}

TEST_F(ServiceTest, CalendarDayFollowsConfiguredOffset) {
  cfg.utc_offset_minutes = 8 * 60;
  ChallengeService svc(cfg);
  svc.submit("alpha", "sv", payload(scores.best), at(0, 15));  // 23:00 local
  EXPECT_NO_THROW(svc.submit("alpha", "sv", payload(scores.best), at(0, 17)));  // 01:00 next local day
  try {
    svc.submit("alpha", "sv", payload(scores.best), at(0, 18));
    FAIL();
  } catch (const QuotaExceededError& e) {
    EXPECT_EQ(e.resets_at(), at(1, 16));
  }
}

TEST_F(ServiceTest, ValidationRejectionIsPersistedAndCounts) {
  cfg.tracks[0].quota_per_day = 2;
  ChallengeService svc(cfg);
  auto partial = payload(scores.best);
  partial = partial.substr(0, partial.find('\n') + 1);
  const auto r = svc.submit("alpha", "sv", partial, at(0));
  EXPECT_EQ(r.status, SubmissionStatus::rejected);
  EXPECT_TRUE(r.metrics.empty());
  EXPECT_FALSE(r.findings.empty());
  EXPECT_EQ(svc.submit("alpha", "sv", "high e t0\n", at(0)).status, SubmissionStatus::rejected);
  EXPECT_THROW(svc.submit("alpha", "sv", payload(scores.best), at(0)), QuotaExceededError);
  EXPECT_EQ(svc.submissions().size(), 2u);
  EXPECT_TRUE(svc.leaderboard("sv", PhaseKind::challenge).empty());
}

TEST_F(ServiceTest, TotalQuotaCountsEveryAttempt) {
  ChallengeService svc(cfg);
  for (int day = 0; day < 10; ++day) {
    const auto r = svc.submit("alpha", "sv", day % 3 ? payload(scores.best) : std::string("bad"), at(day));
    EXPECT_EQ(r.status, day % 3 ? SubmissionStatus::accepted : SubmissionStatus::rejected);
  }
  try {
    svc.submit("alpha", "sv", payload(scores.best), at(10));
    FAIL();
  } catch (const QuotaExceededError& e) {
    EXPECT_EQ(e.window(), QuotaExceededError::Window::total);
  }
  EXPECT_EQ(svc.submissions().size(), 10u);
}

TEST_F(ServiceTest, UnknownTeamOrTrack) {
  ChallengeService svc(cfg);
  EXPECT_THROW(svc.submit("gamma", "sv", payload(scores.best), at(0)), UnauthorizedError);
  EXPECT_THROW(svc.submit("alpha", "nope", payload(scores.best), at(0)), NotFoundError);
  EXPECT_THROW(svc.leaderboard("nope", PhaseKind::challenge), NotFoundError);
  EXPECT_THROW(svc.submission("sub-999999"), NotFoundError);
  EXPECT_EQ(svc.team_for_token("tok-beta"), "beta");
  EXPECT_FALSE(svc.team_for_token("tok-x").has_value());
}

TEST_F(ServiceTest, LeaderboardOrdering) {
  cfg.teams.push_back({"gamma", "tok-gamma"});
  cfg.teams.push_back({"delta", "tok-delta"});
  ChallengeService svc(cfg);
  EXPECT_TRUE(svc.leaderboard("sv", PhaseKind::challenge).empty());
  svc.submit("alpha", "sv", payload(scores.worst), at(0));
  svc.submit("beta", "sv", payload(scores.tie_high), at(0));
  svc.submit("gamma", "sv", payload(scores.tie_low), at(1));
  svc.submit("delta", "sv", payload(scores.tie_low), at(0, 13));
  const auto board = svc.leaderboard("sv", PhaseKind::challenge);
  ASSERT_EQ(board.size(), 4u);
  EXPECT_EQ(board[0].team_id, "delta");  // equal metrics to gamma, submitted earlier
  EXPECT_EQ(board[1].team_id, "gamma");
  EXPECT_EQ(board[2].team_id, "beta");
  EXPECT_EQ(board[3].team_id, "alpha");
  EXPECT_EQ(board[0].metrics.at("min_dcf"), board[2].metrics.at("min_dcf"));
  EXPECT_LT(board[0].metrics.at("eer"), board[2].metrics.at("eer"));

  // A team's entry is its best submission.
  const auto improved = svc.submit("alpha", "sv", payload(scores.best), at(2));
  const auto after = svc.leaderboard("sv", PhaseKind::challenge);
  EXPECT_EQ(after[0].team_id, "alpha");
  EXPECT_EQ(after[0].submission_id, improved.submission_id);
  EXPECT_EQ(after.size(), 4u);
}

TEST_F(ServiceTest, PhaseLifecycle) {
  ChallengeService svc(cfg);
  svc.submit("alpha", "sv", payload(scores.tie_high), at(29));
  EXPECT_THROW(svc.transition_phase("sv", at(29)), ArgumentError);
  EXPECT_THROW(svc.submit("beta", "sv", payload(scores.best), at(30, 1)), PhaseClosedError);

  const auto t = svc.transition_phase("sv", at(30, 2));
  EXPECT_FALSE(t.no_op);
  EXPECT_EQ(t.phase.current, PhaseKind::permanent);
  EXPECT_FALSE(t.phase.challenge_deadline.has_value());
  EXPECT_TRUE(svc.transition_phase("sv", at(31)).no_op);

  // Quotas restart in the permanent phase.
  const auto p = svc.submit("beta", "sv", payload(scores.best), at(31));
  EXPECT_EQ(p.phase_at_receipt, PhaseKind::permanent);
  const auto challenge = svc.leaderboard("sv", PhaseKind::challenge);
  ASSERT_EQ(challenge.size(), 1u);
  EXPECT_EQ(challenge[0].team_id, "alpha");
  const auto permanent = svc.leaderboard("sv", PhaseKind::permanent);
  ASSERT_EQ(permanent.size(), 2u);
  EXPECT_EQ(permanent[0].team_id, "beta");
  EXPECT_EQ(permanent[1].phase_of_submission, PhaseKind::challenge);
}

TEST_F(ServiceTest, OverrideOpensPermanentPhaseEarly) {
  ChallengeService svc(cfg);
  EXPECT_FALSE(svc.transition_phase("sv", at(1), true).no_op);
  EXPECT_EQ(svc.phase("sv").current, PhaseKind::permanent);
}

TEST_F(ServiceTest, PermanentQuotasApply) {
  cfg.tracks[0].permanent_quota_total = 1;
  ChallengeService svc(cfg);
  svc.transition_phase("sv", at(0), true);
  svc.submit("alpha", "sv", payload(scores.best), at(1));
  try {
    svc.submit("alpha", "sv", payload(scores.best), at(2));
    FAIL();
  } catch (const QuotaExceededError& e) {
    EXPECT_EQ(e.window(), QuotaExceededError::Window::total);
  }
}

TEST_F(ServiceTest, ReplayReproducesState) {
  std::string board_c, board_p, log_dump;
  {
    ChallengeService svc(cfg);
    svc.submit("alpha", "sv", payload(scores.tie_high), at(0));
    svc.submit("beta", "sv", payload(scores.tie_low), at(0));
    svc.submit("alpha", "sv", "garbage", at(1));
    svc.transition_phase("sv", at(30));
    svc.submit("alpha", "sv", payload(scores.best), at(31));
    board_c = board_dump(svc, PhaseKind::challenge);
    board_p = board_dump(svc, PhaseKind::permanent);
    for (const auto& r : svc.submissions()) log_dump += to_json(r).dump() + "\n";
  }
  ChallengeService replayed(cfg);
  EXPECT_EQ(board_dump(replayed, PhaseKind::challenge), board_c);
  EXPECT_EQ(board_dump(replayed, PhaseKind::permanent), board_p);
  std::string replay_dump;
  for (const auto& r : replayed.submissions()) replay_dump += to_json(r).dump() + "\n";
  EXPECT_EQ(replay_dump, log_dump);
  EXPECT_EQ(replayed.phase("sv").current, PhaseKind::permanent);
  // Ids continue after the replayed ones; the daily quota sees replayed records.
  EXPECT_THROW(replayed.submit("alpha", "sv", payload(scores.best), at(31)), QuotaExceededError);
  EXPECT_EQ(replayed.submit("beta", "sv", payload(scores.best), at(31)).submission_id, "sub-000005");
}

TEST_F(ServiceTest, ReevaluateMatchesStoredMetrics) {
  ChallengeService svc(cfg);
  svc.submit("alpha", "sv", payload(scores.tie_low), at(0));
  svc.submit("beta", "sv", payload(scores.worst), at(0));
  for (const auto& r : svc.submissions()) EXPECT_EQ(svc.reevaluate(r.submission_id), r.metrics);
}

TEST_F(ServiceTest, ChangedReferenceIsAnIntegrityError) {
  ChallengeService svc(cfg);
  const auto r = svc.submit("alpha", "sv", payload(scores.tie_low), at(0));
  auto changed = trials;
  changed[0].label = false;
  fixture::write_file(cfg.tracks[0].reference, write_trial_list(changed));
  EXPECT_THROW(svc.reevaluate(r.submission_id), IntegrityError);
}

TEST_F(ServiceTest, TamperedPayloadIsAnIntegrityError) {
  ChallengeService svc(cfg);
  const auto r = svc.submit("alpha", "sv", payload(scores.tie_low), at(0));
  fixture::write_file(cfg.data_dir / "payloads" / r.payload_digest, "1.0 e t0\n");
  EXPECT_THROW(svc.reevaluate(r.submission_id), IntegrityError);
}

TEST_F(ServiceTest, ConcurrentSubmissionsRespectQuota) {
  cfg.tracks[0].quota_per_day = 2;
  ChallengeService svc(cfg);
  std::atomic<int> accepted{0}, rejected{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 16; ++i) {
    threads.emplace_back([&, i] {
      try {
        svc.submit(i % 2 ? "alpha" : "beta", "sv", payload(scores.best), at(0));
        ++accepted;
      } catch (const QuotaExceededError&) {
        ++rejected;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(accepted.load(), 4);
  EXPECT_EQ(rejected.load(), 12);
  EXPECT_EQ(svc.submissions().size(), 4u);
}

TEST_F(ServiceTest, DiarisationTrackAtRuntime) {
  ChallengeService svc(cfg);
  fixture::write_file(dir.path() / "ref.rttm", "SPEAKER f1 1 0.00 10.00 <NA> <NA> A <NA> <NA>\n");
  TrackConfig track;
  track.track_id = "sd";
  track.task = Task::diarisation;
  track.reference = dir.path() / "ref.rttm";
  svc.add_track(track, at(0));
  EXPECT_THROW(svc.add_track(track, at(0)), ArgumentError);
  const auto r = svc.submit("alpha", "sd", "SPEAKER f1 1 0.00 8.00 <NA> <NA> X <NA> <NA>\n", at(0));
  ASSERT_EQ(r.status, SubmissionStatus::accepted);
  EXPECT_NEAR(r.metrics.at("der"), 1.75 / 9.5, 1e-12);
  EXPECT_NEAR(r.metrics.at("jer"), 0.2, 1e-12);
  const auto bad = svc.submit("beta", "sd", "SPEAKER ghost 1 0.00 8.00 <NA> <NA> X <NA> <NA>\n", at(0));
  EXPECT_EQ(bad.status, SubmissionStatus::rejected);
  EXPECT_EQ(svc.reevaluate(r.submission_id), r.metrics);
  ChallengeService replayed(cfg);
  EXPECT_EQ(replayed.track_ids(), (std::vector<std::string>{"sd", "sv"}));
  EXPECT_EQ(leaderboard_to_json(replayed.leaderboard("sd", PhaseKind::challenge)).dump(),
            leaderboard_to_json(svc.leaderboard("sd", PhaseKind::challenge)).dump());
}

TEST(ServiceConfigTest, ParsesFileAndOverrides) {
  fixture::TempDir dir;
  fixture::write_file(dir.path() / "trials.txt", "1 e t\n0 e n\n");
  const std::string text = R"({
    "data_dir": "state",
    "timezone": "+05:30",
    "admin_token": "adm",
    "teams": [{"team_id": "a", "token": "ta"}],
    "tracks": [{"track_id": "sv", "task": "verification", "reference": "trials.txt",
                "quota_total": 3, "challenge_deadline": "2024-06-01T00:00:00Z"}]
  })";
  const auto cfg = parse_config(text, dir.path());
  EXPECT_EQ(cfg.data_dir, dir.path() / "state");
  EXPECT_EQ(cfg.utc_offset_minutes, 330);
  ASSERT_EQ(cfg.tracks.size(), 1u);
  EXPECT_EQ(cfg.tracks[0].reference, dir.path() / "trials.txt");
  EXPECT_EQ(cfg.tracks[0].quota_total, 3u);
  EXPECT_EQ(cfg.tracks[0].quota_per_day, 1u);
  EXPECT_EQ(format_timestamp(*cfg.tracks[0].challenge_deadline), "2024-06-01T00:00:00Z");
  EXPECT_THROW(parse_config("{", dir.path()), ConfigError);
  EXPECT_EQ(parse_utc_offset("UTC"), 0);
  EXPECT_EQ(parse_utc_offset("-05:00"), -300);
  EXPECT_THROW(parse_utc_offset("EST"), ConfigError);

  fixture::write_file(dir.path() / "cfg.json", text);
  ::setenv("VOXEVAL_LISTEN", "0.0.0.0:9123", 1);
  ::setenv("VOXEVAL_DATA_DIR", "/tmp/elsewhere", 1);
  const auto loaded = load_config(dir.path() / "cfg.json");
  ::unsetenv("VOXEVAL_LISTEN");
  ::unsetenv("VOXEVAL_DATA_DIR");
  EXPECT_EQ(loaded.listen_host, "0.0.0.0");
  EXPECT_EQ(loaded.listen_port, 9123);
  EXPECT_EQ(loaded.data_dir, "/tmp/elsewhere");
}

TEST(ServiceConfigTest, BadReferenceFailsAtStartup) {
  fixture::TempDir dir;
  auto cfg = fixture::verification_config(dir.path());
  fixture::write_file(cfg.tracks[0].reference, "e t maybe\n");
  EXPECT_THROW(ChallengeService{cfg}, ConfigError);
}

TEST(Timestamps, RoundTrip) {
  const auto t = at(3, 7, 45);
  EXPECT_EQ(format_timestamp(t), "2024-05-04T07:45:00Z");
  EXPECT_EQ(parse_timestamp("2024-05-04T07:45:00Z"), t);
  EXPECT_THROW(parse_timestamp("2024-05-04 07:45"), Error);
}

// ---------------------------------------------------------------------------

TEST_F(ServiceTest, HttpEndpoints) {
  ChallengeService svc(cfg);
  std::atomic<std::int64_t> now{at(0).time_since_epoch().count()};
  HttpFrontend http(svc, [&] { return Timestamp(std::chrono::seconds(now.load())); });
  const int port = http.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread server([&] { http.listen(); });
  http.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  const httplib::Headers alpha = {{"Authorization", "Bearer tok-alpha"}};
  const httplib::Headers admin = {{"Authorization", "Bearer admin-secret"}};

  httplib::MultipartFormDataItems form = {{"payload", payload(scores.tie_low), "scores.txt", "text/plain"}};
  auto res = client.Post("/tracks/sv/submissions", alpha, form);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  const auto body = nlohmann::json::parse(res->body);
  EXPECT_EQ(body["status"], "accepted");
  const std::string id = body["submission_id"];

  res = client.Post("/tracks/sv/submissions", alpha, payload(scores.best), "text/plain");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 429);
  EXPECT_EQ(nlohmann::json::parse(res->body)["window"], "daily");
  EXPECT_EQ(nlohmann::json::parse(res->body)["resets_at"], "2024-05-02T00:00:00Z");

  res = client.Post("/tracks/sv/submissions", {{"Authorization", "Bearer wrong"}}, "x", "text/plain");
  EXPECT_EQ(res->status, 401);
  res = client.Post("/tracks/zz/submissions", alpha, "x", "text/plain");
  EXPECT_EQ(res->status, 404);
  res = client.Post("/tracks/sv/submissions", {{"Authorization", "Bearer tok-beta"}}, "1 e t0\n", "text/plain");
  EXPECT_EQ(res->status, 422);
  EXPECT_FALSE(nlohmann::json::parse(res->body)["findings"].empty());

  res = client.Get("/submissions/" + id);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(nlohmann::json::parse(res->body)["metrics"]["eer"], svc.submission(id).metrics.at("eer"));
  EXPECT_EQ(client.Get("/submissions/sub-424242")->status, 404);

  res = client.Get("/tracks/sv/leaderboard?phase=challenge");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto board = nlohmann::json::parse(res->body);
  ASSERT_EQ(board["entries"].size(), 1u);
  EXPECT_EQ(board["entries"][0]["team_id"], "alpha");
  EXPECT_EQ(board["entries"][0]["rank"], 1);

  EXPECT_EQ(client.Post("/admin/tracks/sv/phase", alpha, "", "application/json")->status, 401);
  EXPECT_EQ(client.Post("/admin/tracks/sv/phase", admin, "", "application/json")->status, 409);
  res = client.Post("/admin/tracks/sv/phase", admin, R"({"override": true})", "application/json");
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(nlohmann::json::parse(res->body)["phase"], "permanent");
  res = client.Post("/admin/tracks/sv/phase", admin, "", "application/json");
  EXPECT_EQ(nlohmann::json::parse(res->body)["no_op"], true);

  fixture::write_file(dir.path() / "ref.rttm", "SPEAKER f1 1 0.00 10.00 <NA> <NA> A <NA> <NA>\n");
  const nlohmann::json track = {{"track_id", "sd"},
                                {"task", "diarisation"},
                                {"reference", (dir.path() / "ref.rttm").string()}};
  EXPECT_EQ(client.Post("/admin/tracks", alpha, track.dump(), "application/json")->status, 401);
  EXPECT_EQ(client.Post("/admin/tracks", admin, track.dump(), "application/json")->status, 201);
  now += 86400;
  res = client.Post("/tracks/sd/submissions", alpha, "SPEAKER f1 1 0 8 <NA> <NA> X <NA> <NA>\n", "text/plain");
  EXPECT_EQ(res->status, 201);

  http.stop();
  server.join();
}
