// src/bootstrap.cpp

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
#include <exception>
#include <numeric>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "voxeval/analysis.hpp"
#include "voxeval/errors.hpp"

namespace voxeval {

std::string_view metric_name(Metric m) { return m == Metric::eer ? "eer" : "min_dcf"; }

Metric parse_metric(std::string_view name) {
  if (name == "eer") return Metric::eer;
  if (name == "min_dcf" || name == "mindcf") return Metric::min_dcf;
  throw ArgumentError(fmt::format("unknown metric '{}' (expected eer or min_dcf)", name));
}

double evaluate_metric(const ErrorProfile& profile, Metric metric, const DcfParams& params) {
  return metric == Metric::eer ? eer(profile) : min_dcf(profile, params).value;
}

double quantile_linear(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ArgumentError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

namespace {

std::mt19937_64 resample_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

ConfidenceInterval bootstrap_ci(std::span<const ScoredTrial> trials,
                                const BootstrapOptions& options) {
  std::vector<double> values;
  return bootstrap_ci(trials, options, values);
}

ConfidenceInterval bootstrap_ci(std::span<const ScoredTrial> trials,
                                const BootstrapOptions& options,
                                std::vector<double>& resample_values) {
  if (options.n_resamples == 0) throw ArgumentError("n_resamples must be positive");
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw ArgumentError(fmt::format("confidence level must be in (0, 1), got {}", options.level));
  }

  // Sort once; a resample is then a multiplicity per sorted position.
  const std::size_t n = trials.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return trials[a].score < trials[b].score;
  });
  std::vector<double> scores(n);
  std::vector<std::uint8_t> labels(n);
  std::size_t n_target = 0;
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = trials[order[i]].score;
    labels[i] = trials[order[i]].target ? 1 : 0;
    n_target += labels[i];
  }

  ErrorProfile full;
  build_weighted_profile(scores, labels, std::vector<std::uint32_t>(n, 1), full);

  ConfidenceInterval ci;
  ci.point = evaluate_metric(full, options.metric, options.params);
  ci.level = options.level;
  ci.n_resamples = options.n_resamples;
  ci.seed = options.seed;

  resample_values.assign(options.n_resamples, 0.0);
  auto run = [&](std::size_t first, std::size_t stride) {
    std::vector<std::uint32_t> counts(n);
    ErrorProfile profile;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t r = first; r < options.n_resamples; r += stride) {
      auto engine = resample_engine(options.seed, r);
      std::size_t drawn_targets = 0;
      do {
        std::fill(counts.begin(), counts.end(), 0u);
        drawn_targets = 0;
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t pos = pick(engine);
          ++counts[pos];
          drawn_targets += labels[pos];
        }
      } while (drawn_targets == 0 || drawn_targets == n);
      if (options.metric == Metric::eer) {
        resample_values[r] = weighted_eer(scores, labels, counts);
      } else {
        build_weighted_profile(scores, labels, counts, profile);
        resample_values[r] = min_dcf(profile, options.params).value;
      }
    }
  };

  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(options.n_resamples)));
  if (threads == 1) {
    run(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          run(t, threads);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<double> sorted = resample_values;
  std::sort(sorted.begin(), sorted.end());
  const double tail = (1.0 - options.level) / 2.0;
  ci.low = quantile_linear(sorted, tail);
  ci.high = quantile_linear(sorted, 1.0 - tail);
  return ci;
}

WidthStats ci_width_stats(std::span<const ConfidenceInterval> intervals) {
  WidthStats stats;
  double sum = 0.0;
  for (const auto& ci : intervals) {
    if (ci.point == 0.0) {
      ++stats.n_excluded;
      continue;
    }
    const double w = (ci.high - ci.low) / ci.point;
    if (stats.n_used == 0) {
      stats.min = stats.max = w;
    } else {
      stats.min = std::min(stats.min, w);
      stats.max = std::max(stats.max, w);
    }
    sum += w;
    ++stats.n_used;
  }
  if (stats.n_used == 0) {
    throw UndefinedMetricError("no interval with a non-zero point estimate");
  }
  stats.mean = sum / static_cast<double>(stats.n_used);
  return stats;
}

}  // namespace voxeval
