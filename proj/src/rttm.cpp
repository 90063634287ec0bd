// src/rttm.cpp

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

#include "voxeval/rttm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "voxeval/errors.hpp"
#include "voxeval/text.hpp"

namespace voxeval {

Annotation::Annotation(std::string file_id, std::vector<Turn> turns)
    : file_id_(std::move(file_id)), turns_(std::move(turns)) {
  for (const auto& t : turns_) {
    if (t.file_id != file_id_) {
      throw ArgumentError(fmt::format("turn for file '{}' added to annotation of '{}'",
                                      t.file_id, file_id_));
    }
    if (!std::isfinite(t.onset) || !std::isfinite(t.duration) || t.onset < 0.0 ||
        !(t.duration > 0.0)) {
      throw ArgumentError(fmt::format("invalid turn [{}, +{}) for speaker '{}'", t.onset,
                                      t.duration, t.speaker_id));
    }
  }
  std::stable_sort(turns_.begin(), turns_.end(), [](const Turn& a, const Turn& b) {
    return std::tie(a.onset, a.speaker_id, a.duration) < std::tie(b.onset, b.speaker_id, b.duration);
  });
}

std::vector<std::string> Annotation::speakers() const {
  std::set<std::string> ids;
  for (const auto& t : turns_) ids.insert(t.speaker_id);
  return {ids.begin(), ids.end()};
}

Timeline Annotation::speaker_timeline(const std::string& speaker_id) const {
  std::vector<Interval> ivs;
  for (const auto& t : turns_) {
    if (t.speaker_id == speaker_id) ivs.push_back({t.onset, t.offset()});
  }
  return Timeline(std::move(ivs));
}

Timeline Annotation::speech() const {
  std::vector<Interval> ivs;
  ivs.reserve(turns_.size());
  for (const auto& t : turns_) ivs.push_back({t.onset, t.offset()});
  return Timeline(std::move(ivs));
}

double Annotation::end_time() const {
  double end = 0.0;
  for (const auto& t : turns_) end = std::max(end, t.offset());
  return end;
}

AnnotationSet parse_rttm(std::string_view text) {
  std::map<std::string, std::vector<Turn>> grouped;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    auto fields = split_fields(line);
    if (fields.empty() || fields[0].starts_with('#') || fields[0].starts_with(";;")) return;
    if (fields.size() != 10) {
      throw ParseError(line_no, fmt::format("expected 10 fields, found {}", fields.size()));
    }
    if (fields[0] != "SPEAKER") {
      throw ParseError(line_no, fmt::format("record type must be SPEAKER, found '{}'", fields[0]));
    }
    auto channel = parse_int(fields[2]);
    if (!channel || *channel < std::numeric_limits<int>::min() ||
        *channel > std::numeric_limits<int>::max()) {
      throw ParseError(line_no, fmt::format("channel '{}' is not an integer", fields[2]));
    }
    auto onset = parse_double(fields[3]);
    if (!onset || !std::isfinite(*onset)) {
      throw ParseError(line_no, fmt::format("onset '{}' is not a finite number", fields[3]));
    }
    if (*onset < 0.0) throw ParseError(line_no, fmt::format("onset {} is negative", fields[3]));
    auto duration = parse_double(fields[4]);
    if (!duration || !std::isfinite(*duration)) {
      throw ParseError(line_no, fmt::format("duration '{}' is not a finite number", fields[4]));
    }
    if (!(*duration > 0.0)) {
      throw ParseError(line_no, fmt::format("duration {} is not positive", fields[4]));
    }
    Turn turn{std::string(fields[1]), static_cast<int>(*channel), *onset, *duration,
              std::string(fields[7])};
    grouped[turn.file_id].push_back(std::move(turn));
  });

  AnnotationSet out;
  for (auto& [file_id, turns] : grouped) {
    out.emplace(file_id, Annotation(file_id, std::move(turns)));
  }
  return out;
}

std::string write_rttm(const AnnotationSet& annotations) {
  std::string out;
  for (const auto& [file_id, annotation] : annotations) {
    for (const auto& t : annotation.turns()) {
      out += fmt::format("SPEAKER {} {} {} {} <NA> <NA> {} <NA> <NA>\n", t.file_id, t.channel,
                         format_fixed_roundtrip(t.onset, 2),
                         format_fixed_roundtrip(t.duration, 2), t.speaker_id);
    }
  }
  return out;
}

Timeline collar_exclusion(const Annotation& reference, double collar) {
  if (!(collar >= 0.0) || !std::isfinite(collar)) {
    throw ArgumentError(fmt::format("collar must be a non-negative number, got {}", collar));
  }
  std::vector<Interval> zones;
  zones.reserve(2 * reference.turns().size());
  for (const auto& t : reference.turns()) {
    for (double b : {t.onset, t.offset()}) {
      zones.push_back({std::max(0.0, b - collar), b + collar});
    }
  }
  return Timeline(std::move(zones));
}

}  // namespace voxeval
