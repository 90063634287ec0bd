// src/verification.cpp

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

#include "voxeval/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "voxeval/errors.hpp"

namespace voxeval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_both_classes(std::size_t n_target, std::size_t n_nontarget) {
  if (n_target == 0) throw UndefinedMetricError("no target trials; metric is undefined");
  if (n_nontarget == 0) throw UndefinedMetricError("no nontarget trials; metric is undefined");
}

void require_valid(const ErrorProfile& profile) {
  require_both_classes(profile.n_target, profile.n_nontarget);
  if (profile.points.empty()) throw UndefinedMetricError("empty error profile");
}

}  // namespace

void build_weighted_profile(std::span<const double> sorted_scores,
                            std::span<const std::uint8_t> is_target,
                            std::span<const std::uint32_t> weights, ErrorProfile& out) {
  if (sorted_scores.size() != is_target.size() || sorted_scores.size() != weights.size()) {
    throw ArgumentError("score, label and weight arrays differ in length");
  }
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
  for (std::size_t i = 0; i < sorted_scores.size(); ++i) {
    n_target += is_target[i] ? weights[i] : 0;
    n_nontarget += is_target[i] ? 0 : weights[i];
  }
  require_both_classes(n_target, n_nontarget);

  out.points.clear();
  out.n_target = n_target;
  out.n_nontarget = n_nontarget;
  const double nt = static_cast<double>(n_target);
  const double nn = static_cast<double>(n_nontarget);

  // Walking upwards, targets below the threshold are misses and nontargets at
  // or above it are false alarms.
  std::size_t misses = 0;
  std::size_t false_alarms = n_nontarget;
  std::size_t i = 0;
  while (i < sorted_scores.size()) {
    if (weights[i] == 0) {
      ++i;
      continue;
    }
    const double threshold = sorted_scores[i];
    out.points.push_back({threshold, misses / nt, false_alarms / nn, misses, false_alarms});
    for (; i < sorted_scores.size() && sorted_scores[i] == threshold; ++i) {
      misses += is_target[i] ? weights[i] : 0;
      false_alarms -= is_target[i] ? 0 : weights[i];
    }
  }
  out.points.push_back({kInf, 1.0, 0.0, n_target, 0});
}

ErrorProfile error_profile(std::span<const double> target_scores,
                           std::span<const double> nontarget_scores) {
  const std::size_t n = target_scores.size() + nontarget_scores.size();
  std::vector<std::pair<double, std::uint8_t>> all;
  all.reserve(n);
  for (double s : target_scores) all.emplace_back(s, 1);
  for (double s : nontarget_scores) all.emplace_back(s, 0);
  for (const auto& [s, _] : all) {
    if (!std::isfinite(s)) throw ArgumentError("non-finite score in error profile input");
  }
  std::sort(all.begin(), all.end());

  std::vector<double> scores(n);
  std::vector<std::uint8_t> labels(n);
  std::vector<std::uint32_t> weights(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = all[i].first;
    labels[i] = all[i].second;
  }
  ErrorProfile profile;
  build_weighted_profile(scores, labels, weights, profile);
  return profile;
}

ErrorProfile error_profile(std::span<const ScoredTrial> trials) {
  std::vector<double> targets;
  std::vector<double> nontargets;
  for (const auto& t : trials) (t.target ? targets : nontargets).push_back(t.score);
  return error_profile(targets, nontargets);
}

double eer(const ErrorProfile& profile) {
  require_valid(profile);
  const auto& pts = profile.points;
  const std::size_t nt = profile.n_target;
  const std::size_t nn = profile.n_nontarget;
  // sign(p_miss - p_fa) compared on integers: n_miss * nn vs n_fa * nt.
  auto sign = [&](const OperatingPoint& p) {
    const std::size_t lhs = p.n_miss * nn;
    const std::size_t rhs = p.n_fa * nt;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int s = sign(pts[i]);
    if (s == 0) return pts[i].p_miss;
    if (s > 0) {
      // Profile starts at p_miss = 0, p_fa = 1, so i > 0 here.
      const auto& a = pts[i - 1];
      const auto& b = pts[i];
      const double t = (a.p_fa - a.p_miss) / ((b.p_miss - a.p_miss) - (b.p_fa - a.p_fa));
      return a.p_miss + t * (b.p_miss - a.p_miss);
    }
  }
  throw UndefinedMetricError("error profile has no miss/false-alarm crossing");
}

double weighted_eer(std::span<const double> sorted_scores, std::span<const std::uint8_t> is_target,
                    std::span<const std::uint32_t> weights) {
  if (sorted_scores.size() != is_target.size() || sorted_scores.size() != weights.size()) {
    throw ArgumentError("score, label and weight arrays differ in length");
  }
  std::size_t nt = 0;
  std::size_t nn = 0;
  for (std::size_t i = 0; i < sorted_scores.size(); ++i) {
    nt += is_target[i] ? weights[i] : 0;
    nn += is_target[i] ? 0 : weights[i];
  }
  require_both_classes(nt, nn);
  const double dnt = static_cast<double>(nt);
  const double dnn = static_cast<double>(nn);

  // Same walk as build_weighted_profile, stopping at the first point where
  // misses overtake false alarms.
  std::size_t prev_miss = 0;
  std::size_t prev_fa = nn;
  std::size_t misses = 0;
  std::size_t false_alarms = nn;
  auto crossing = [&]() -> std::optional<double> {
    const std::size_t lhs = misses * nn;
    const std::size_t rhs = false_alarms * nt;
    if (lhs == rhs) return misses / dnt;
    if (lhs < rhs) return std::nullopt;
    const double a_miss = prev_miss / dnt, a_fa = prev_fa / dnn;
    const double b_miss = misses / dnt, b_fa = false_alarms / dnn;
    const double t = (a_fa - a_miss) / ((b_miss - a_miss) - (b_fa - a_fa));
    return a_miss + t * (b_miss - a_miss);
  };
  std::size_t i = 0;
  while (i < sorted_scores.size()) {
    if (weights[i] == 0) {
      ++i;
      continue;
    }
    if (const auto v = crossing()) return *v;
    prev_miss = misses;
    prev_fa = false_alarms;
    const double threshold = sorted_scores[i];
    for (; i < sorted_scores.size() && sorted_scores[i] == threshold; ++i) {
      misses += is_target[i] ? weights[i] : 0;
      false_alarms -= is_target[i] ? 0 : weights[i];
    }
  }
  return *crossing();
}

double dcf(double p_miss, double p_fa, const DcfParams& params) {
  return params.c_miss * p_miss * params.p_tar + params.c_fa * p_fa * (1.0 - params.p_tar);
}

DcfResult min_dcf(const ErrorProfile& profile, const DcfParams& params) {
  require_valid(profile);
  DcfResult best{kInf, 0.0};
  for (const auto& p : profile.points) {
    const double value = dcf(p.p_miss, p.p_fa, params);
    if (value < best.value) best = {value, p.threshold};
  }
  return best;
}

double probit(double p) {
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, p);
}

std::vector<DetPoint> det_points(const ErrorProfile& profile, bool use_probit,
                                 const DcfParams& params) {
  require_valid(profile);
  const DcfResult best = min_dcf(profile, params);
  auto clamp_rate = [](double rate, std::size_t n) {
    const double lo = 1.0 / (2.0 * static_cast<double>(n));
    return std::clamp(rate, lo, 1.0 - lo);
  };
  std::vector<DetPoint> out;
  out.reserve(profile.points.size());
  bool flagged = false;
  for (const auto& p : profile.points) {
    DetPoint d;
    d.p_fa = p.p_fa;
    d.p_miss = p.p_miss;
    d.threshold = p.threshold;
    if (use_probit) {
      d.x = probit(clamp_rate(p.p_fa, profile.n_nontarget));
      d.y = probit(clamp_rate(p.p_miss, profile.n_target));
    } else {
      d.x = p.p_fa;
      d.y = p.p_miss;
    }
    if (!flagged && p.threshold == best.threshold) {
      d.is_min_dcf = true;
      flagged = true;
    }
    out.push_back(d);
  }
  return out;
}

std::string det_csv(std::span<const DetPoint> points, bool use_probit) {
  std::string out = use_probit ? "p_fa,p_miss,threshold,is_min_dcf,probit_p_fa,probit_p_miss\n"
                               : "p_fa,p_miss,threshold,is_min_dcf\n";
  for (const auto& d : points) {
    out += fmt::format("{},{},{},{}", d.p_fa, d.p_miss, d.threshold, d.is_min_dcf ? 1 : 0);
    if (use_probit) out += fmt::format(",{},{}", d.x, d.y);
    out += '\n';
  }
  return out;
}

}  // namespace voxeval
