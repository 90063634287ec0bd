// src/trials.cpp

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

#include "voxeval/trials.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "voxeval/text.hpp"

namespace voxeval {

namespace {

std::string pair_key(std::string_view enroll, std::string_view test) {
  std::string key;
  key.reserve(enroll.size() + test.size() + 1);
  key.append(enroll).push_back(' ');
  key.append(test);
  return key;
}

bool is_comment_or_blank(std::string_view line) {
  auto fields = split_fields(line);
  return fields.empty() || fields.front().front() == '#';
}

}  // namespace

std::vector<TrialPair> parse_trial_list(std::string_view text, bool expect_labels) {
  std::vector<TrialPair> trials;
  std::unordered_set<std::string> seen;
  const std::size_t arity = expect_labels ? 3 : 2;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_comment_or_blank(line)) return;
    auto fields = split_fields(line);
    if (fields.size() != arity) {
      throw ParseError(line_no, fmt::format("expected {} fields, found {}", arity, fields.size()));
    }
    TrialPair trial;
    std::size_t k = 0;
    if (expect_labels) {
      if (fields[0] != "0" && fields[0] != "1") {
        throw ParseError(line_no, fmt::format("label must be 0 or 1, found '{}'", fields[0]));
      }
      trial.label = fields[0] == "1";
      k = 1;
    }
    trial.enroll_id = std::string(fields[k]);
    trial.test_id = std::string(fields[k + 1]);
    if (!seen.insert(pair_key(trial.enroll_id, trial.test_id)).second) {
      throw ValidationError(fmt::format("line {}: duplicate trial '{} {}'", line_no,
                                        trial.enroll_id, trial.test_id),
                            {pair_key(trial.enroll_id, trial.test_id)});
    }
    trials.push_back(std::move(trial));
  });
  return trials;
}

std::vector<ScoreRecord> parse_score_file(std::string_view text) {
  std::vector<ScoreRecord> scores;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_comment_or_blank(line)) return;
    auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw ParseError(line_no, fmt::format("expected 3 fields, found {}", fields.size()));
    }
    auto score = parse_double(fields[0]);
    if (!score) throw ParseError(line_no, fmt::format("score '{}' is not a number", fields[0]));
    if (!std::isfinite(*score)) {
      throw ParseError(line_no, fmt::format("score '{}' is not finite", fields[0]));
    }
    scores.push_back({*score, std::string(fields[1]), std::string(fields[2])});
  });
  return scores;
}

std::string write_trial_list(std::span<const TrialPair> trials) {
  std::string out;
  for (const auto& t : trials) {
    if (t.label) out += *t.label ? "1 " : "0 ";
    out += pair_key(t.enroll_id, t.test_id);
    out += '\n';
  }
  return out;
}

std::string write_score_file(std::span<const ScoreRecord> scores) {
  std::string out;
  for (const auto& s : scores) {
    out += fmt::format("{} {} {}\n", s.score, s.enroll_id, s.test_id);
  }
  return out;
}

std::vector<std::string> CoverageReport::findings() const {
  std::vector<std::string> out;
  for (const auto& p : missing) out.push_back("missing score for trial: " + p);
  for (const auto& p : extra) out.push_back("score for unknown trial: " + p);
  for (const auto& p : duplicates) out.push_back("duplicate score for trial: " + p);
  return out;
}

CoverageReport check_coverage(std::span<const TrialPair> trials,
                              std::span<const ScoreRecord> scores) {
  std::unordered_map<std::string, std::size_t> counts;
  counts.reserve(scores.size());
  std::vector<std::string> order;
  for (const auto& s : scores) {
    auto key = pair_key(s.enroll_id, s.test_id);
    if (counts[key]++ == 0) order.push_back(std::move(key));
  }

  CoverageReport report;
  std::unordered_set<std::string> known;
  known.reserve(trials.size());
  for (const auto& t : trials) {
    auto key = pair_key(t.enroll_id, t.test_id);
    if (!counts.contains(key)) report.missing.push_back(key);
    known.insert(std::move(key));
  }
  for (const auto& key : order) {
    if (!known.contains(key)) report.extra.push_back(key);
    if (counts[key] > 1) report.duplicates.push_back(key);
  }
  return report;
}

SubmissionInvalidError::SubmissionInvalidError(CoverageReport report)
    : ValidationError(fmt::format("score submission does not cover the trial list exactly "
                                  "({} missing, {} extra, {} duplicated)",
                                  report.missing.size(), report.extra.size(),
                                  report.duplicates.size()),
                      report.findings()),
      report_(std::move(report)) {}

std::vector<ScoredTrial> join_scores(std::span<const TrialPair> trials,
                                     std::span<const ScoreRecord> scores) {
  for (const auto& t : trials) {
    if (!t.label) throw ArgumentError("join_scores needs a labelled trial list");
  }
  auto report = check_coverage(trials, scores);
  if (!report.ok()) throw SubmissionInvalidError(std::move(report));

  std::unordered_map<std::string, double> by_pair;
  by_pair.reserve(scores.size());
  for (const auto& s : scores) by_pair.emplace(pair_key(s.enroll_id, s.test_id), s.score);

  std::vector<ScoredTrial> out;
  out.reserve(trials.size());
  for (const auto& t : trials) {
    out.push_back({t.enroll_id, t.test_id, *t.label, by_pair.at(pair_key(t.enroll_id, t.test_id))});
  }
  return out;
}

}  // namespace voxeval
