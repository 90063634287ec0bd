// include/voxeval/timeline.hpp

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

#include <initializer_list>
#include <vector>

namespace voxeval {

// Half-open interval [start, end) in seconds.
struct Interval {
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// A set of time points stored as sorted, disjoint, non-empty intervals.
// Touching intervals are merged and empty ones dropped on construction, so
// two Timelines covering the same set always compare equal.
class Timeline {
 public:
  Timeline() = default;
  explicit Timeline(std::vector<Interval> intervals);
  Timeline(std::initializer_list<Interval> intervals)
      : Timeline(std::vector<Interval>(intervals)) {}

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  std::size_t size() const { return intervals_.size(); }
  double total_duration() const;
  bool contains(double t) const;

  friend bool operator==(const Timeline&, const Timeline&) = default;

 private:
  struct Normalized {};
  Timeline(Normalized, std::vector<Interval> intervals) : intervals_(std::move(intervals)) {}

  friend Timeline unite(const Timeline&, const Timeline&);
  friend Timeline intersect(const Timeline&, const Timeline&);
  friend Timeline subtract(const Timeline&, const Timeline&);

  std::vector<Interval> intervals_;
};

Timeline unite(const Timeline& a, const Timeline& b);
Timeline intersect(const Timeline& a, const Timeline& b);
Timeline subtract(const Timeline& a, const Timeline& b);

inline double total_duration(const Timeline& t) { return t.total_duration(); }

}  // namespace voxeval
