// include/voxeval/analysis.hpp

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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voxeval/trials.hpp"
#include "voxeval/verification.hpp"

namespace voxeval {

// ---------------------------------------------------------------------------
// Bootstrap confidence intervals

enum class Metric { eer, min_dcf };

std::string_view metric_name(Metric m);
Metric parse_metric(std::string_view name);  // "eer" | "min_dcf" | "mindcf"

struct BootstrapOptions {
  Metric metric = Metric::eer;
  DcfParams params;
  std::size_t n_resamples = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct ConfidenceInterval {
  double point = 0.0;
  double low = 0.0;
  double high = 0.0;
  double level = 0.95;
  std::size_t n_resamples = 0;
  std::uint64_t seed = 0;
};

// Percentile bootstrap. Each resample draws |trials| trials uniformly with
// replacement; draws missing a class are redrawn. Resample r uses its own
// generator seeded from (seed, r), so the result does not depend on the
// thread count.
ConfidenceInterval bootstrap_ci(std::span<const ScoredTrial> trials,
                                const BootstrapOptions& options);

// Also returns the per-resample metric values, in resample order.
ConfidenceInterval bootstrap_ci(std::span<const ScoredTrial> trials,
                                const BootstrapOptions& options,
                                std::vector<double>& resample_values);

// Linear interpolation between order statistics of an ascending sample.
double quantile_linear(std::span<const double> sorted, double p);

double evaluate_metric(const ErrorProfile& profile, Metric metric, const DcfParams& params);

struct WidthStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  std::size_t n_used = 0;
  std::size_t n_excluded = 0;  // intervals with point == 0
};

// Relative widths (high - low) / point.
WidthStats ci_width_stats(std::span<const ConfidenceInterval> intervals);

// ---------------------------------------------------------------------------
// Trial metadata and slices

enum class Gender { male, female, unknown };
enum class Column { duration, gender, language, pair_kind };

std::string_view column_name(Column c);

struct UtteranceInfo {
  std::optional<double> duration;
  std::optional<Gender> gender;
  std::optional<std::string> language;
};

struct TrialAttributes {
  std::optional<double> enroll_duration;
  std::optional<double> test_duration;
  std::optional<Gender> enroll_gender;
  std::optional<Gender> test_gender;
  std::optional<std::string> enroll_language;
  std::optional<std::string> test_language;
  std::optional<std::string> pair_kind;
};

// Sidecar metadata: per-utterance CSV "utterance_id,duration,gender,language"
// (any subset of the value columns) and optional per-trial CSV
// "enroll,test,pair_kind". Empty cells are missing values.
class MetadataTable {
 public:
  void load_utterances(std::string_view csv);
  void load_pair_kinds(std::string_view csv);

  void set_utterance(const std::string& id, UtteranceInfo info);
  void set_pair_kind(const std::string& enroll, const std::string& test, std::string kind);

  bool has_column(Column c) const { return columns_.contains(c); }
  TrialAttributes attributes(const std::string& enroll, const std::string& test) const;

 private:
  std::map<std::string, UtteranceInfo> utterances_;
  std::map<std::pair<std::string, std::string>, std::string> pair_kinds_;
  std::set<Column> columns_;
};

// A named trial filter. `test` returns nullopt when the attributes it needs
// are missing for a trial; such trials are excluded and counted.
struct SlicePredicate {
  std::string name;
  std::vector<Column> columns;
  std::function<std::optional<bool>(const TrialAttributes&)> test;
};

SlicePredicate slice_all();
SlicePredicate slice_min_duration(double seconds);  // both sides strictly longer
SlicePredicate slice_same_gender(Gender g);
SlicePredicate slice_same_language(std::string language);
SlicePredicate slice_pair_kind_in(std::set<std::string> kinds);

// "all", "dur>X", "gender=G", "lang=L", "kind=A|B|...". ConfigError otherwise.
SlicePredicate parse_slice_spec(std::string_view spec);

struct SliceRow {
  std::string name;
  std::size_t n_pairs = 0;
  std::size_t n_excluded = 0;
  std::size_t n_target = 0;
  std::optional<double> eer;  // empty when a class is missing
  std::optional<DcfResult> min_dcf;
};

// ConfigError when a predicate needs a column the table does not carry.
std::vector<SliceRow> slice_eval(std::span<const ScoredTrial> trials, const MetadataTable& metadata,
                                 std::span<const SlicePredicate> slices,
                                 const DcfParams& params = {});

std::string slice_csv(std::span<const SliceRow> rows);
std::string slice_text(std::span<const SliceRow> rows);

// ---------------------------------------------------------------------------
// Cross-system progression

struct SystemScores {
  std::string name;
  std::vector<ScoreRecord> scores;
};

struct ProgressionRow {
  std::string name;
  double eer = 0.0;
  DcfResult min_dcf;
};

// Sorted by minDCF, then EER, then name. A system whose scores do not cover
// the trial list exactly raises ValidationError naming it.
std::vector<ProgressionRow> progression_table(std::span<const TrialPair> trials,
                                              std::span<const SystemScores> systems,
                                              const DcfParams& params = {});

std::string progression_csv(std::span<const ProgressionRow> rows);
std::string progression_text(std::span<const ProgressionRow> rows);

}  // namespace voxeval
