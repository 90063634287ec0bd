// include/voxeval/text.hpp

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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace voxeval {

// Reads a whole file; throws voxeval::Error naming the path on failure.
std::string read_text_file(const std::filesystem::path& path);

// Splits on runs of ASCII spaces and tabs.
std::vector<std::string_view> split_fields(std::string_view line);

// Calls fn(line_number, line) for every line, with trailing '\r' removed.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
    pos = nl + 1;
  }
}

// Strict decimal parse of the whole token; nullopt on junk or trailing text.
std::optional<double> parse_double(std::string_view token);
std::optional<long long> parse_int(std::string_view token);

// Shortest fixed-point rendering with at least `min_decimals` fractional
// digits that parses back to exactly `value`.
std::string format_fixed_roundtrip(double value, int min_decimals);

}  // namespace voxeval
