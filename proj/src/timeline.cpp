// src/timeline.cpp

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

#include "voxeval/timeline.hpp"

#include <algorithm>

namespace voxeval {

namespace {

// Appends [start, end) to a sorted run, merging with the tail if it touches.
void append_merged(std::vector<Interval>& out, Interval iv) {
  if (!(iv.start < iv.end)) return;
  if (!out.empty() && iv.start <= out.back().end) {
    out.back().end = std::max(out.back().end, iv.end);
    return;
  }
  out.push_back(iv);
}

}  // namespace

Timeline::Timeline(std::vector<Interval> intervals) {
  std::sort(intervals.begin(), intervals.end(), [](const Interval& x, const Interval& y) {
    return x.start < y.start || (x.start == y.start && x.end < y.end);
  });
  intervals_.reserve(intervals.size());
  for (const auto& iv : intervals) append_merged(intervals_, iv);
}

double Timeline::total_duration() const {
  double total = 0.0;
  for (const auto& iv : intervals_) total += iv.duration();
  return total;
}

bool Timeline::contains(double t) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                             [](double v, const Interval& iv) { return v < iv.start; });
  if (it == intervals_.begin()) return false;
  --it;
  return t < it->end;
}

Timeline unite(const Timeline& a, const Timeline& b) {
  std::vector<Interval> out;
  out.reserve(a.size() + b.size());
  auto i = a.intervals_.begin();
  auto j = b.intervals_.begin();
  while (i != a.intervals_.end() || j != b.intervals_.end()) {
    if (j == b.intervals_.end() || (i != a.intervals_.end() && i->start <= j->start)) {
      append_merged(out, *i++);
    } else {
      append_merged(out, *j++);
    }
  }
  return Timeline(Timeline::Normalized{}, std::move(out));
}

Timeline intersect(const Timeline& a, const Timeline& b) {
  std::vector<Interval> out;
  auto i = a.intervals_.begin();
  auto j = b.intervals_.begin();
  while (i != a.intervals_.end() && j != b.intervals_.end()) {
    const double lo = std::max(i->start, j->start);
    const double hi = std::min(i->end, j->end);
    if (lo < hi) out.push_back({lo, hi});
    if (i->end < j->end) {
      ++i;
    } else {
      ++j;
    }
  }
  return Timeline(Timeline::Normalized{}, std::move(out));
}

Timeline subtract(const Timeline& a, const Timeline& b) {
  std::vector<Interval> out;
  auto j = b.intervals_.begin();
  for (const auto& iv : a.intervals_) {
    double cursor = iv.start;
    while (j != b.intervals_.end() && j->end <= cursor) ++j;
    auto k = j;
    while (k != b.intervals_.end() && k->start < iv.end) {
      if (k->start > cursor) out.push_back({cursor, k->start});
      cursor = std::max(cursor, k->end);
      if (cursor >= iv.end) break;
      ++k;
    }
    if (cursor < iv.end) out.push_back({cursor, iv.end});
  }
  return Timeline(Timeline::Normalized{}, std::move(out));
}

}  // namespace voxeval
