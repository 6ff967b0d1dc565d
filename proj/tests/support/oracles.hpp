// Copyright 2026 The trafficllm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Reference computations for tests. Nothing here calls into the library's
// classification, conflict, or LCS code paths.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace trafficllm::testing {

/// Movement table written out by hand: heading -> {through, left, right}
/// egress letters. U-turn letters are absent.
inline char reference_movement(const std::string& heading, char egress) {
  static const std::map<std::string, std::map<char, char>> table{
      {"north", {{'E', 'T'}, {'F', 'T'}, {'C', 'L'}, {'D', 'L'}, {'G', 'R'}, {'H', 'R'}}},
      {"east", {{'G', 'T'}, {'H', 'T'}, {'E', 'L'}, {'F', 'L'}, {'A', 'R'}, {'B', 'R'}}},
      {"south", {{'A', 'T'}, {'B', 'T'}, {'G', 'L'}, {'H', 'L'}, {'C', 'R'}, {'D', 'R'}}},
      {"west", {{'C', 'T'}, {'D', 'T'}, {'A', 'L'}, {'B', 'L'}, {'E', 'R'}, {'F', 'R'}}},
  };
  const auto& row = table.at(heading);
  const auto it = row.find(egress);
  return it == row.end() ? 'U' : it->second;
}

/// Compass angle of travel in degrees.
inline int heading_degrees(const std::string& heading) {
  if (heading == "north") return 0;
  if (heading == "east") return 90;
  if (heading == "south") return 180;
  return 270;
}

struct PlainVehicle {
  std::string heading;
  char egress;
  double arrival_s;
};

/// Direct transcription of the conflict definition over plain values.
inline bool reference_conflict(const PlainVehicle& a, const PlainVehicle& b, double window_s) {
  const int delta = ((heading_degrees(a.heading) - heading_degrees(b.heading)) % 360 + 360) % 360;
  bool crossing = false;
  if (delta == 0) {
    crossing = false;
  } else if (delta == 180) {
    crossing = reference_movement(a.heading, a.egress) == 'L' || reference_movement(b.heading, b.egress) == 'L';
  } else {
    crossing = true;
  }
  return crossing && std::fabs(a.arrival_s - b.arrival_s) <= window_s;
}

/// LCS length by enumerating every subsequence of `a` (|a| <= 20).
template <typename T>
std::size_t brute_force_lcs(const std::vector<T>& a, const std::vector<T>& b) {
  std::size_t best = 0;
  const std::uint32_t subsets = 1u << a.size();
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    const auto len = static_cast<std::size_t>(__builtin_popcount(mask));
    if (len <= best) continue;
    std::size_t j = 0;
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      while (j < b.size() && !(b[j] == a[i])) ++j;
      if (j == b.size()) ok = false;
      else ++j;
    }
    if (ok) best = len;
  }
  return best;
}

/// Full-table textbook LCS dynamic program.
template <typename T>
std::size_t table_lcs(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    }
  }
  return t[a.size()][b.size()];
}

/// All sequences over {0,1,2} of length 0..max_len, shortest first.
inline std::vector<std::vector<int>> all_ternary_lists(std::size_t max_len) {
  std::vector<std::vector<int>> out{{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (int s = 0; s < 3; ++s) {
        auto next = out[i];
        next.push_back(s);
        out.push_back(std::move(next));
      }
    }
    begin = end;
  }
  return out;
}

}  // namespace trafficllm::testing
