// include/voxeval/diarisation.hpp

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
#include <vector>

#include "voxeval/hungarian.hpp"
#include "voxeval/rttm.hpp"
#include "voxeval/timeline.hpp"

namespace voxeval {

inline constexpr double kDefaultCollar = 0.25;

// Seconds of co-occurring speech for every (reference, hypothesis) speaker pair.
struct OverlapMatrix {
  std::vector<std::string> ref_speakers;
  std::vector<std::string> hyp_speakers;
  WeightMatrix seconds;

  double cell(std::size_t i, std::size_t j) const { return seconds.at(i, j); }
};

// Reference speaker -> hypothesis speaker, one-to-one.
struct SpeakerMapping {
  std::map<std::string, std::string> ref_to_hyp;
  double mapped_overlap = 0.0;
};

struct DerBreakdown {
  double miss = 0.0;
  double fa = 0.0;
  double conf = 0.0;
  double reference_total = 0.0;
  double der = 0.0;  // NaN when reference_total is 0

  DerBreakdown& operator+=(const DerBreakdown& other);
};

struct SpeakerJer {
  double miss = 0.0;
  double fa = 0.0;
  double total = 0.0;
  double jer = 1.0;
  std::string mapped_to;  // empty when unmapped
};

struct JerBreakdown {
  std::map<std::string, SpeakerJer> per_speaker;
  double jer = 0.0;
};

OverlapMatrix overlap_matrix(const Annotation& reference, const Annotation& hypothesis,
                             const Timeline& scoring_region);

// Optimal mapping by total overlap. Pairs with zero overlap are dropped.
SpeakerMapping hungarian_assignment(const OverlapMatrix& matrix);

// Whole recording (from 0 to the last turn of either side) minus the
// reference collar zones.
Timeline scoring_region(const Annotation& reference, const Annotation& hypothesis,
                        double collar);

// Throws UndefinedMetricError when no reference speech is left to score.
DerBreakdown der(const Annotation& reference, const Annotation& hypothesis,
                 double collar = kDefaultCollar);

// Same as der() but returns a NaN ratio instead of throwing on an empty
// scored reference; used for corpus accumulation.
DerBreakdown der_components(const Annotation& reference, const Annotation& hypothesis,
                            double collar = kDefaultCollar);

// Zero collar, overlap included; unmapped reference speakers score 1. The
// mapping maximises overlap (to the microsecond); ties go to the mapping with
// the lowest JER.
JerBreakdown jer(const Annotation& reference, const Annotation& hypothesis);

// Sums components over files before taking the ratio. A reference file with
// no hypothesis is scored against an empty one; a hypothesis file with no
// reference is a ValidationError.
DerBreakdown der_corpus(const AnnotationSet& references, const AnnotationSet& hypotheses,
                        double collar = kDefaultCollar);

struct FileScore {
  std::string file_id;
  DerBreakdown der;
  JerBreakdown jer;
};

struct DiarisationReport {
  std::vector<FileScore> files;  // in file_id order
  DerBreakdown corpus_der;
  // Mean JER over every reference speaker of every file.
  double corpus_jer = 0.0;
};

DiarisationReport score_diarisation(const AnnotationSet& references,
                                    const AnnotationSet& hypotheses,
                                    double collar = kDefaultCollar);

// "file_id,miss,fa,conf,reference_total,der" rows, corpus row last as OVERALL.
std::string diarisation_csv(const DiarisationReport& report);
// Aligned table with DER/JER as percentages (2 decimals).
std::string diarisation_text(const DiarisationReport& report);

}  // namespace voxeval
