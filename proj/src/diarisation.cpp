// src/diarisation.cpp

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

#include "voxeval/diarisation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "voxeval/errors.hpp"

namespace voxeval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_same_file(const Annotation& reference, const Annotation& hypothesis) {
  if (reference.file_id() != hypothesis.file_id()) {
    throw ArgumentError(fmt::format("reference '{}' and hypothesis '{}' are different files",
                                    reference.file_id(), hypothesis.file_id()));
  }
}

std::vector<Timeline> speaker_timelines(const Annotation& a,
                                        const std::vector<std::string>& speakers) {
  std::vector<Timeline> out;
  out.reserve(speakers.size());
  for (const auto& s : speakers) out.push_back(a.speaker_timeline(s));
  return out;
}

// Maximum overlap counted in whole microseconds; among mappings that reach it,
// the one with the largest summed Jaccard index (lowest JER).
SpeakerMapping jer_mapping(const OverlapMatrix& m, const std::vector<Timeline>& ref_lines,
                           const std::vector<Timeline>& hyp_lines) {
  const std::size_t rows = m.ref_speakers.size();
  const std::size_t cols = m.hyp_speakers.size();
  IntWeightMatrix micros(rows, cols);
  WeightMatrix jaccard(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double overlap = m.cell(i, j);
      micros.at(i, j) = std::llround(overlap * 1e6);
      const double uni = ref_lines[i].total_duration() + hyp_lines[j].total_duration() - overlap;
      jaccard.at(i, j) = uni > 0.0 ? overlap / uni : 0.0;
    }
  }
  const Assignment a = max_weight_assignment(micros, jaccard);
  SpeakerMapping mapping;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!a.row_to_col[i]) continue;
    const std::size_t j = *a.row_to_col[i];
    if (m.cell(i, j) > 0.0) {
      mapping.ref_to_hyp.emplace(m.ref_speakers[i], m.hyp_speakers[j]);
      mapping.mapped_overlap += m.cell(i, j);
    }
  }
  return mapping;
}

// Index of each reference speaker's mapped hypothesis speaker, or npos.
std::vector<std::size_t> mapping_indices(const OverlapMatrix& m, const SpeakerMapping& mapping) {
  std::vector<std::size_t> out(m.ref_speakers.size(), std::string::npos);
  for (std::size_t i = 0; i < m.ref_speakers.size(); ++i) {
    auto it = mapping.ref_to_hyp.find(m.ref_speakers[i]);
    if (it == mapping.ref_to_hyp.end()) continue;
    auto pos = std::find(m.hyp_speakers.begin(), m.hyp_speakers.end(), it->second);
    out[i] = static_cast<std::size_t>(pos - m.hyp_speakers.begin());
  }
  return out;
}

void finalize(DerBreakdown& b) {
  b.der = b.reference_total > 0.0 ? (b.miss + b.fa + b.conf) / b.reference_total : kNaN;
}

void reject_unknown_files(const AnnotationSet& references, const AnnotationSet& hypotheses) {
  std::vector<std::string> unknown;
  for (const auto& [file_id, _] : hypotheses) {
    if (!references.contains(file_id)) unknown.push_back("hypothesis for unknown file: " + file_id);
  }
  if (!unknown.empty()) {
    throw ValidationError(fmt::format("{} hypothesis file(s) have no reference", unknown.size()),
                          std::move(unknown));
  }
}

}  // namespace

DerBreakdown& DerBreakdown::operator+=(const DerBreakdown& other) {
  miss += other.miss;
  fa += other.fa;
  conf += other.conf;
  reference_total += other.reference_total;
  finalize(*this);
  return *this;
}

OverlapMatrix overlap_matrix(const Annotation& reference, const Annotation& hypothesis,
                             const Timeline& region) {
  require_same_file(reference, hypothesis);
  OverlapMatrix m;
  m.ref_speakers = reference.speakers();
  m.hyp_speakers = hypothesis.speakers();
  m.seconds = WeightMatrix(m.ref_speakers.size(), m.hyp_speakers.size());
  const auto hyp_lines = speaker_timelines(hypothesis, m.hyp_speakers);
  for (std::size_t i = 0; i < m.ref_speakers.size(); ++i) {
    const Timeline ref_line = intersect(reference.speaker_timeline(m.ref_speakers[i]), region);
    for (std::size_t j = 0; j < m.hyp_speakers.size(); ++j) {
      m.seconds.at(i, j) = intersect(ref_line, hyp_lines[j]).total_duration();
    }
  }
  return m;
}

SpeakerMapping hungarian_assignment(const OverlapMatrix& matrix) {
  const Assignment a = max_weight_assignment(matrix.seconds);
  SpeakerMapping mapping;
  for (std::size_t i = 0; i < a.row_to_col.size(); ++i) {
    if (!a.row_to_col[i]) continue;
    const std::size_t j = *a.row_to_col[i];
    const double overlap = matrix.cell(i, j);
    if (overlap > 0.0) {
      mapping.ref_to_hyp.emplace(matrix.ref_speakers[i], matrix.hyp_speakers[j]);
      mapping.mapped_overlap += overlap;
    }
  }
  return mapping;
}

Timeline scoring_region(const Annotation& reference, const Annotation& hypothesis,
                        double collar) {
  const Timeline exclusion = collar_exclusion(reference, collar);
  const double end = std::max(reference.end_time(), hypothesis.end_time());
  return subtract(Timeline{{0.0, end}}, exclusion);
}

DerBreakdown der_components(const Annotation& reference, const Annotation& hypothesis,
                            double collar) {
  require_same_file(reference, hypothesis);
  const Timeline region = scoring_region(reference, hypothesis, collar);
  const OverlapMatrix m = overlap_matrix(reference, hypothesis, region);
  const std::vector<std::size_t> mapped = mapping_indices(m, hungarian_assignment(m));
  const auto ref_lines = speaker_timelines(reference, m.ref_speakers);
  const auto hyp_lines = speaker_timelines(hypothesis, m.hyp_speakers);

  // Every quantity is constant between consecutive boundaries.
  std::vector<double> bounds;
  for (const auto* a : {&reference, &hypothesis}) {
    for (const auto& t : a->turns()) {
      bounds.push_back(t.onset);
      bounds.push_back(t.offset());
    }
  }
  for (const auto& iv : region.intervals()) {
    bounds.push_back(iv.start);
    bounds.push_back(iv.end);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  DerBreakdown b;
  std::vector<char> hyp_active(m.hyp_speakers.size());
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    const double mid = 0.5 * (bounds[k] + bounds[k + 1]);
    if (!region.contains(mid)) continue;
    const double span = bounds[k + 1] - bounds[k];
    std::size_t n_hyp = 0;
    for (std::size_t j = 0; j < hyp_lines.size(); ++j) {
      hyp_active[j] = hyp_lines[j].contains(mid);
      n_hyp += hyp_active[j];
    }
    std::size_t n_ref = 0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ref_lines.size(); ++i) {
      if (!ref_lines[i].contains(mid)) continue;
      ++n_ref;
      if (mapped[i] != std::string::npos && hyp_active[mapped[i]]) ++correct;
    }
    if (n_ref > n_hyp) b.miss += span * static_cast<double>(n_ref - n_hyp);
    if (n_hyp > n_ref) b.fa += span * static_cast<double>(n_hyp - n_ref);
    b.conf += span * static_cast<double>(std::min(n_ref, n_hyp) - correct);
    b.reference_total += span * static_cast<double>(n_ref);
  }
  finalize(b);
  return b;
}

DerBreakdown der(const Annotation& reference, const Annotation& hypothesis, double collar) {
  DerBreakdown b = der_components(reference, hypothesis, collar);
  if (!(b.reference_total > 0.0)) {
    throw UndefinedMetricError(
        fmt::format("file '{}' has no scored reference speech", reference.file_id()));
  }
  return b;
}

JerBreakdown jer(const Annotation& reference, const Annotation& hypothesis) {
  require_same_file(reference, hypothesis);
  if (reference.empty()) {
    throw UndefinedMetricError(fmt::format("file '{}' has an empty reference", reference.file_id()));
  }
  const double end = std::max(reference.end_time(), hypothesis.end_time());
  const OverlapMatrix m = overlap_matrix(reference, hypothesis, Timeline{{0.0, end}});
  const SpeakerMapping mapping = jer_mapping(m, speaker_timelines(reference, m.ref_speakers),
                                             speaker_timelines(hypothesis, m.hyp_speakers));

  JerBreakdown out;
  double sum = 0.0;
  for (const auto& spk : m.ref_speakers) {
    SpeakerJer s;
    const Timeline ref_line = reference.speaker_timeline(spk);
    if (auto it = mapping.ref_to_hyp.find(spk); it != mapping.ref_to_hyp.end()) {
      const Timeline hyp_line = hypothesis.speaker_timeline(it->second);
      s.mapped_to = it->second;
      s.total = unite(ref_line, hyp_line).total_duration();
      s.miss = subtract(ref_line, hyp_line).total_duration();
      s.fa = subtract(hyp_line, ref_line).total_duration();
      s.jer = (s.miss + s.fa) / s.total;
    } else {
      s.total = ref_line.total_duration();
      s.miss = s.total;
      s.jer = 1.0;
    }
    sum += s.jer;
    out.per_speaker.emplace(spk, s);
  }
  out.jer = sum / static_cast<double>(out.per_speaker.size());
  return out;
}

DerBreakdown der_corpus(const AnnotationSet& references, const AnnotationSet& hypotheses,
                        double collar) {
  reject_unknown_files(references, hypotheses);
  DerBreakdown total;
  for (const auto& [file_id, ref] : references) {
    auto it = hypotheses.find(file_id);
    total += der_components(ref, it != hypotheses.end() ? it->second : Annotation(file_id), collar);
  }
  if (!(total.reference_total > 0.0)) {
    throw UndefinedMetricError("corpus has no scored reference speech");
  }
  return total;
}

DiarisationReport score_diarisation(const AnnotationSet& references,
                                    const AnnotationSet& hypotheses, double collar) {
  reject_unknown_files(references, hypotheses);
  DiarisationReport report;
  double jer_sum = 0.0;
  std::size_t n_speakers = 0;
  for (const auto& [file_id, ref] : references) {
    auto it = hypotheses.find(file_id);
    const Annotation hyp = it != hypotheses.end() ? it->second : Annotation(file_id);
    FileScore fs{file_id, der_components(ref, hyp, collar), jer(ref, hyp)};
    report.corpus_der += fs.der;
    for (const auto& [_, s] : fs.jer.per_speaker) jer_sum += s.jer;
    n_speakers += fs.jer.per_speaker.size();
    report.files.push_back(std::move(fs));
  }
  finalize(report.corpus_der);
  report.corpus_jer = n_speakers > 0 ? jer_sum / static_cast<double>(n_speakers) : kNaN;
  return report;
}

namespace {

std::string pct(double ratio) {
  return std::isnan(ratio) ? std::string("-") : fmt::format("{:.2f}%", 100.0 * ratio);
}

}  // namespace

std::string diarisation_csv(const DiarisationReport& report) {
  std::string out = "file_id,miss,fa,conf,reference_total,der\n";
  auto row = [&](const std::string& id, const DerBreakdown& b) {
    out += fmt::format("{},{:.3f},{:.3f},{:.3f},{:.3f},{}\n", id, b.miss, b.fa, b.conf,
                       b.reference_total, std::isnan(b.der) ? std::string("-")
                                                             : fmt::format("{:.6f}", b.der));
  };
  for (const auto& f : report.files) row(f.file_id, f.der);
  row("OVERALL", report.corpus_der);
  return out;
}

std::string diarisation_text(const DiarisationReport& report) {
  std::size_t width = std::string("OVERALL").size();
  for (const auto& f : report.files) width = std::max(width, f.file_id.size());
  std::string out = fmt::format("{:<{}}  {:>8}  {:>8}  {:>9}  {:>9}  {:>9}  {:>9}\n", "file_id",
                                width, "DER", "JER", "MISS", "FA", "CONF", "REF");
  auto row = [&](const std::string& id, const DerBreakdown& b, double j) {
    out += fmt::format("{:<{}}  {:>8}  {:>8}  {:>9.3f}  {:>9.3f}  {:>9.3f}  {:>9.3f}\n", id, width,
                       pct(b.der), pct(j), b.miss, b.fa, b.conf, b.reference_total);
  };
  for (const auto& f : report.files) row(f.file_id, f.der, f.jer.jer);
  row("OVERALL", report.corpus_der, report.corpus_jer);
  return out;
}

}  // namespace voxeval
