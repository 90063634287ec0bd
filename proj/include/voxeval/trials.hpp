// include/voxeval/trials.hpp

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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voxeval/errors.hpp"

namespace voxeval {

// One verification question. `label` is absent for blind lists.
struct TrialPair {
  std::string enroll_id;
  std::string test_id;
  std::optional<bool> label;

  friend bool operator==(const TrialPair&, const TrialPair&) = default;
};

struct ScoreRecord {
  double score = 0.0;
  std::string enroll_id;
  std::string test_id;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

struct ScoredTrial {
  std::string enroll_id;
  std::string test_id;
  bool target = false;
  double score = 0.0;
};

// Lines are "label enroll test" (expect_labels) or "enroll test".
// Blank lines and lines starting with '#' are skipped.
std::vector<TrialPair> parse_trial_list(std::string_view text, bool expect_labels);

// Lines are "score enroll test"; scores must be finite.
std::vector<ScoreRecord> parse_score_file(std::string_view text);

std::string write_trial_list(std::span<const TrialPair> trials);
std::string write_score_file(std::span<const ScoreRecord> scores);

// Coverage of a score submission against a trial list. Pairs are rendered
// as "enroll test".
struct CoverageReport {
  std::vector<std::string> missing;     // trials with no score
  std::vector<std::string> extra;       // scores for pairs not in the list
  std::vector<std::string> duplicates;  // pairs scored more than once

  bool ok() const { return missing.empty() && extra.empty() && duplicates.empty(); }
  std::vector<std::string> findings() const;
};

CoverageReport check_coverage(std::span<const TrialPair> trials,
                              std::span<const ScoreRecord> scores);

// Thrown by join_scores when coverage is not exact.
class SubmissionInvalidError : public ValidationError {
 public:
  explicit SubmissionInvalidError(CoverageReport report);
  const CoverageReport& report() const { return report_; }

 private:
  CoverageReport report_;
};

// Attaches each trial's score, in trial-list order. Requires labelled trials.
std::vector<ScoredTrial> join_scores(std::span<const TrialPair> trials,
                                     std::span<const ScoreRecord> scores);

}  // namespace voxeval
