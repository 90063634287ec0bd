// include/voxeval/rttm.hpp

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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "voxeval/timeline.hpp"

namespace voxeval {

// One speech segment of one speaker (an RTTM SPEAKER row).
struct Turn {
  std::string file_id;
  int channel = 1;
  double onset = 0.0;
  double duration = 0.0;
  std::string speaker_id;

  double offset() const { return onset + duration; }
  friend bool operator==(const Turn&, const Turn&) = default;
};

// All turns of one recording, ordered by (onset, speaker_id, duration).
// Turns of different speakers may overlap.
class Annotation {
 public:
  explicit Annotation(std::string file_id, std::vector<Turn> turns = {});

  const std::string& file_id() const { return file_id_; }
  const std::vector<Turn>& turns() const { return turns_; }
  bool empty() const { return turns_.empty(); }

  // Distinct speaker labels, sorted.
  std::vector<std::string> speakers() const;
  // Union of one speaker's turns; empty for unknown labels.
  Timeline speaker_timeline(const std::string& speaker_id) const;
  // Union of every turn.
  Timeline speech() const;
  // Latest turn offset, or 0 for an empty annotation.
  double end_time() const;

  friend bool operator==(const Annotation&, const Annotation&) = default;

 private:
  std::string file_id_;
  std::vector<Turn> turns_;
};

using AnnotationSet = std::map<std::string, Annotation>;

// Ten whitespace-separated fields per line:
//   SPEAKER file channel onset duration ortho stype speaker conf slat
// Blank lines and lines starting with '#' or ';;' are skipped.
AnnotationSet parse_rttm(std::string_view text);

// Inverse of parse_rttm. Files in key order, turns in annotation order.
std::string write_rttm(const AnnotationSet& annotations);

// Union of [b - collar, b + collar] over every turn boundary b, clipped at 0.
Timeline collar_exclusion(const Annotation& reference, double collar);

}  // namespace voxeval
