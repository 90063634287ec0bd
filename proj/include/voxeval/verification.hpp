// include/voxeval/verification.hpp

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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "voxeval/trials.hpp"

namespace voxeval {

// Rates at one decision threshold; a trial is accepted iff score >= threshold.
// Counts are kept alongside the rates so every rate is an exact ratio.
struct OperatingPoint {
  double threshold = 0.0;
  double p_miss = 0.0;
  double p_fa = 0.0;
  std::size_t n_miss = 0;
  std::size_t n_fa = 0;
};

// Operating points for every distinct score (ascending), followed by the
// reject-all point at +inf. The first point accepts every trial.
struct ErrorProfile {
  std::vector<OperatingPoint> points;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
};

struct DcfParams {
  double c_miss = 1.0;
  double c_fa = 1.0;
  double p_tar = 0.05;
};

struct DcfResult {
  double value = 0.0;
  double threshold = 0.0;
};

ErrorProfile error_profile(std::span<const ScoredTrial> trials);
ErrorProfile error_profile(std::span<const double> target_scores,
                           std::span<const double> nontarget_scores);

// Builds a profile for a multiset of trials given as distinct-or-not scores
// sorted ascending, each with a label and a multiplicity (0 skips it).
// `out` is overwritten; its storage is reused.
void build_weighted_profile(std::span<const double> sorted_scores,
                            std::span<const std::uint8_t> is_target,
                            std::span<const std::uint32_t> weights, ErrorProfile& out);

// eer(build_weighted_profile(...)) without materialising the profile.
double weighted_eer(std::span<const double> sorted_scores, std::span<const std::uint8_t> is_target,
                    std::span<const std::uint32_t> weights);

double eer(const ErrorProfile& profile);

// C_miss * P_miss * P_tar + C_fa * P_fa * (1 - P_tar), unnormalised.
double dcf(double p_miss, double p_fa, const DcfParams& params = {});

// Minimum over the profile's operating points; ties go to the smallest threshold.
DcfResult min_dcf(const ErrorProfile& profile, const DcfParams& params = {});

struct DetPoint {
  double x = 0.0;  // p_fa, or its probit
  double y = 0.0;  // p_miss, or its probit
  double p_fa = 0.0;
  double p_miss = 0.0;
  double threshold = 0.0;
  bool is_min_dcf = false;
};

// DET staircase in profile order. With `probit`, rates are clamped to
// [1/(2n), 1 - 1/(2n)] for their class size n and mapped through the
// standard normal quantile.
std::vector<DetPoint> det_points(const ErrorProfile& profile, bool probit,
                                 const DcfParams& params = {});

// Header "p_fa,p_miss,threshold,is_min_dcf" (+ ",probit_p_fa,probit_p_miss").
std::string det_csv(std::span<const DetPoint> points, bool probit);

double probit(double p);

}  // namespace voxeval
