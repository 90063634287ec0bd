// src/analysis.cpp

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

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "voxeval/analysis.hpp"
#include "voxeval/errors.hpp"
#include "voxeval/text.hpp"

namespace voxeval {

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    std::string_view cell = line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
    cells.push_back(cell);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cells;
}

std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "m" || s == "male" || s == "M") return Gender::male;
  if (s == "f" || s == "female" || s == "F") return Gender::female;
  if (s == "u" || s == "unknown" || s == "U") return Gender::unknown;
  return std::nullopt;
}

std::string_view gender_name(Gender g) {
  switch (g) {
    case Gender::male: return "male";
    case Gender::female: return "female";
    case Gender::unknown: return "unknown";
  }
  return "unknown";
}

// Calls fn(line_no, cells) for each data row after checking the header.
template <typename Fn>
void for_each_csv_row(std::string_view csv, Fn&& fn,
                      std::function<void(std::size_t, const std::vector<std::string_view>&)> header) {
  bool seen_header = false;
  for_each_line(csv, [&](std::size_t line_no, std::string_view line) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    auto cells = split_csv(line);
    if (!seen_header) {
      header(line_no, cells);
      seen_header = true;
      return;
    }
    fn(line_no, cells);
  });
}

std::string format_rate(const std::optional<double>& v) {
  return v ? fmt::format("{:.3f}%", 100.0 * *v) : std::string("-");
}

std::string format_dcf(const std::optional<DcfResult>& v) {
  return v ? fmt::format("{:.4f}", v->value) : std::string("-");
}

}  // namespace

std::string_view column_name(Column c) {
  switch (c) {
    case Column::duration: return "duration";
    case Column::gender: return "gender";
    case Column::language: return "language";
    case Column::pair_kind: return "pair_kind";
  }
  return "?";
}

void MetadataTable::load_utterances(std::string_view csv) {
  std::ptrdiff_t id_col = -1, dur_col = -1, gender_col = -1, lang_col = -1;
  std::size_t width = 0;
  for_each_csv_row(
      csv,
      [&](std::size_t line_no, const std::vector<std::string_view>& cells) {
        if (cells.size() != width) {
          throw ParseError(line_no, fmt::format("expected {} columns, found {}", width, cells.size()));
        }
        UtteranceInfo info;
        if (dur_col >= 0 && !cells[dur_col].empty()) {
          auto d = parse_double(cells[dur_col]);
          if (!d || !std::isfinite(*d) || *d < 0.0) {
            throw ParseError(line_no, fmt::format("bad duration '{}'", cells[dur_col]));
          }
          info.duration = *d;
        }
        if (gender_col >= 0 && !cells[gender_col].empty()) {
          info.gender = parse_gender(cells[gender_col]);
          if (!info.gender) {
            throw ParseError(line_no, fmt::format("bad gender '{}'", cells[gender_col]));
          }
        }
        if (lang_col >= 0 && !cells[lang_col].empty()) info.language = std::string(cells[lang_col]);
        if (cells[id_col].empty()) throw ParseError(line_no, "empty utterance_id");
        set_utterance(std::string(cells[id_col]), std::move(info));
      },
      [&](std::size_t line_no, const std::vector<std::string_view>& cells) {
        width = cells.size();
        for (std::size_t i = 0; i < cells.size(); ++i) {
          const auto c = static_cast<std::ptrdiff_t>(i);
          if (cells[i] == "utterance_id") id_col = c;
          else if (cells[i] == "duration") dur_col = c;
          else if (cells[i] == "gender") gender_col = c;
          else if (cells[i] == "language") lang_col = c;
        }
        if (id_col < 0) throw ParseError(line_no, "metadata header lacks an utterance_id column");
      });
  if (dur_col >= 0) columns_.insert(Column::duration);
  if (gender_col >= 0) columns_.insert(Column::gender);
  if (lang_col >= 0) columns_.insert(Column::language);
}

void MetadataTable::load_pair_kinds(std::string_view csv) {
  for_each_csv_row(
      csv,
      [&](std::size_t line_no, const std::vector<std::string_view>& cells) {
        if (cells.size() != 3 || cells[0].empty() || cells[1].empty()) {
          throw ParseError(line_no, "expected 'enroll,test,pair_kind'");
        }
        if (!cells[2].empty()) {
          set_pair_kind(std::string(cells[0]), std::string(cells[1]), std::string(cells[2]));
        }
      },
      [&](std::size_t line_no, const std::vector<std::string_view>& cells) {
        if (cells.size() != 3 || cells[0] != "enroll" || cells[1] != "test" ||
            cells[2] != "pair_kind") {
          throw ParseError(line_no, "pair metadata header must be 'enroll,test,pair_kind'");
        }
      });
  columns_.insert(Column::pair_kind);
}

void MetadataTable::set_utterance(const std::string& id, UtteranceInfo info) {
  if (info.duration) columns_.insert(Column::duration);
  if (info.gender) columns_.insert(Column::gender);
  if (info.language) columns_.insert(Column::language);
  utterances_[id] = std::move(info);
}

void MetadataTable::set_pair_kind(const std::string& enroll, const std::string& test,
                                  std::string kind) {
  columns_.insert(Column::pair_kind);
  pair_kinds_[{enroll, test}] = std::move(kind);
}

TrialAttributes MetadataTable::attributes(const std::string& enroll, const std::string& test) const {
  TrialAttributes a;
  if (auto it = utterances_.find(enroll); it != utterances_.end()) {
    a.enroll_duration = it->second.duration;
    a.enroll_gender = it->second.gender;
    a.enroll_language = it->second.language;
  }
  if (auto it = utterances_.find(test); it != utterances_.end()) {
    a.test_duration = it->second.duration;
    a.test_gender = it->second.gender;
    a.test_language = it->second.language;
  }
  if (auto it = pair_kinds_.find({enroll, test}); it != pair_kinds_.end()) a.pair_kind = it->second;
  return a;
}

SlicePredicate slice_all() {
  return {"all", {}, [](const TrialAttributes&) -> std::optional<bool> { return true; }};
}

SlicePredicate slice_min_duration(double seconds) {
  return {fmt::format("dur>{}", seconds), {Column::duration},
          [seconds](const TrialAttributes& a) -> std::optional<bool> {
            if (!a.enroll_duration || !a.test_duration) return std::nullopt;
            return *a.enroll_duration > seconds && *a.test_duration > seconds;
          }};
}

SlicePredicate slice_same_gender(Gender g) {
  return {fmt::format("gender={}", gender_name(g)), {Column::gender},
          [g](const TrialAttributes& a) -> std::optional<bool> {
            if (!a.enroll_gender || !a.test_gender) return std::nullopt;
            return *a.enroll_gender == g && *a.test_gender == g;
          }};
}

SlicePredicate slice_same_language(std::string language) {
  std::string name = "lang=" + language;
  return {std::move(name), {Column::language},
          [language = std::move(language)](const TrialAttributes& a) -> std::optional<bool> {
            if (!a.enroll_language || !a.test_language) return std::nullopt;
            return *a.enroll_language == language && *a.test_language == language;
          }};
}

SlicePredicate slice_pair_kind_in(std::set<std::string> kinds) {
  std::string name = "kind=";
  bool first = true;
  for (const auto& k : kinds) {
    if (!first) name += '|';
    name += k;
    first = false;
  }
  return {std::move(name), {Column::pair_kind},
          [kinds = std::move(kinds)](const TrialAttributes& a) -> std::optional<bool> {
            if (!a.pair_kind) return std::nullopt;
            return kinds.contains(*a.pair_kind);
          }};
}

SlicePredicate parse_slice_spec(std::string_view spec) {
  if (spec == "all") return slice_all();
  const std::size_t op = spec.find_first_of("=>");
  if (op == std::string_view::npos || op == 0 || op + 1 >= spec.size()) {
    throw ConfigError(fmt::format("cannot parse slice '{}'", spec));
  }
  const std::string_view key = spec.substr(0, op);
  const std::string_view value = spec.substr(op + 1);
  const char sym = spec[op];
  if ((key == "dur" || key == "duration") && sym == '>') {
    auto x = parse_double(value);
    if (!x || !std::isfinite(*x)) throw ConfigError(fmt::format("bad duration in slice '{}'", spec));
    return slice_min_duration(*x);
  }
  if (key == "gender" && sym == '=') {
    auto g = parse_gender(value);
    if (!g) throw ConfigError(fmt::format("bad gender in slice '{}'", spec));
    return slice_same_gender(*g);
  }
  if ((key == "lang" || key == "language") && sym == '=') {
    return slice_same_language(std::string(value));
  }
  if ((key == "kind" || key == "pair_kind") && sym == '=') {
    std::set<std::string> kinds;
    std::size_t pos = 0;
    while (pos <= value.size()) {
      std::size_t bar = value.find('|', pos);
      if (bar == std::string_view::npos) bar = value.size();
      if (bar > pos) kinds.emplace(value.substr(pos, bar - pos));
      pos = bar + 1;
    }
    if (kinds.empty()) throw ConfigError(fmt::format("empty pair-kind set in slice '{}'", spec));
    return slice_pair_kind_in(std::move(kinds));
  }
  throw ConfigError(fmt::format("unknown metadata attribute '{}' in slice '{}'", key, spec));
}

std::vector<SliceRow> slice_eval(std::span<const ScoredTrial> trials, const MetadataTable& metadata,
                                 std::span<const SlicePredicate> slices, const DcfParams& params) {
  for (const auto& s : slices) {
    for (Column c : s.columns) {
      if (!metadata.has_column(c)) {
        throw ConfigError(fmt::format("slice '{}' needs metadata column '{}', which was not loaded",
                                      s.name, column_name(c)));
      }
    }
  }
  std::vector<TrialAttributes> attrs;
  attrs.reserve(trials.size());
  for (const auto& t : trials) attrs.push_back(metadata.attributes(t.enroll_id, t.test_id));

  std::vector<SliceRow> rows;
  for (const auto& s : slices) {
    SliceRow row;
    row.name = s.name;
    std::vector<double> targets;
    std::vector<double> nontargets;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      const auto keep = s.test(attrs[i]);
      if (!keep) {
        ++row.n_excluded;
        continue;
      }
      if (!*keep) continue;
      (trials[i].target ? targets : nontargets).push_back(trials[i].score);
    }
    row.n_pairs = targets.size() + nontargets.size();
    row.n_target = targets.size();
    if (!targets.empty() && !nontargets.empty()) {
      const ErrorProfile profile = error_profile(targets, nontargets);
      row.eer = eer(profile);
      row.min_dcf = min_dcf(profile, params);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string slice_csv(std::span<const SliceRow> rows) {
  std::string out = "slice,n_pairs,n_excluded,eer,min_dcf\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", r.name, r.n_pairs, r.n_excluded,
                       r.eer ? fmt::format("{}", *r.eer) : std::string("-"),
                       r.min_dcf ? fmt::format("{}", r.min_dcf->value) : std::string("-"));
  }
  return out;
}

std::string slice_text(std::span<const SliceRow> rows) {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::string out = fmt::format("{:<{}}  {:>9}  {:>9}  {:>9}  {:>8}\n", "slice", width, "n_pairs",
                                "excluded", "EER", "minDCF");
  for (const auto& r : rows) {
    out += fmt::format("{:<{}}  {:>9}  {:>9}  {:>9}  {:>8}\n", r.name, width, r.n_pairs,
                       r.n_excluded, format_rate(r.eer), format_dcf(r.min_dcf));
  }
  return out;
}

std::vector<ProgressionRow> progression_table(std::span<const TrialPair> trials,
                                              std::span<const SystemScores> systems,
                                              const DcfParams& params) {
  std::vector<ProgressionRow> rows;
  for (const auto& system : systems) {
    std::vector<ScoredTrial> scored;
    try {
      scored = join_scores(trials, system.scores);
    } catch (const SubmissionInvalidError& e) {
      throw ValidationError(fmt::format("system '{}': {}", system.name, e.what()), e.findings());
    }
    const ErrorProfile profile = error_profile(scored);
    rows.push_back({system.name, eer(profile), min_dcf(profile, params)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ProgressionRow& a, const ProgressionRow& b) {
    if (a.min_dcf.value != b.min_dcf.value) return a.min_dcf.value < b.min_dcf.value;
    if (a.eer != b.eer) return a.eer < b.eer;
    return a.name < b.name;
  });
  return rows;
}

std::string progression_csv(std::span<const ProgressionRow> rows) {
  std::string out = "rank,system,eer,min_dcf,threshold\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += fmt::format("{},{},{},{},{}\n", i + 1, rows[i].name, rows[i].eer, rows[i].min_dcf.value,
                       rows[i].min_dcf.threshold);
  }
  return out;
}

std::string progression_text(std::span<const ProgressionRow> rows) {
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::string out =
      fmt::format("{:>4}  {:<{}}  {:>9}  {:>8}\n", "rank", "system", width, "EER", "minDCF");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += fmt::format("{:>4}  {:<{}}  {:>9}  {:>8.4f}\n", i + 1, rows[i].name, width,
                       fmt::format("{:.3f}%", 100.0 * rows[i].eer), rows[i].min_dcf.value);
  }
  return out;
}

}  // namespace voxeval
