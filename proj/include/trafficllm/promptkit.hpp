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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "trafficllm/dataset.hpp"
#include "trafficllm/error.hpp"
#include "trafficllm/format.hpp"
#include "trafficllm/io.hpp"
#include "trafficllm/layout.hpp"
#include "trafficllm/oracle.hpp"
#include "trafficllm/random.hpp"
#include "trafficllm/scenario.hpp"

namespace trafficllm {

/// Chain-of-thought system prompt. `{north}`..`{west}` receive the lane
/// bullets for each heading.
inline constexpr std::string_view kSystemPromptTemplate =
    R"(You are an Urban Intersection Traffic Conflict Detector, responsible for monitoring a four-way intersection with traffic coming from the north, east, south, and west. Each direction has two lanes guiding vehicles to different destinations:

- North: {north}
- East: {east}
- South: {south}
- West: {west}

Analyze the traffic data from all directions and lanes, and determine if there is a potential conflict between vehicles at the intersection. Respond only with 'Yes' or 'No' for conflict detection.

Output:

- If there **is a conflict**, provide a report with the following structure:
 - **Conflict Status**: State whether a conflict is detected (e.g., "Conflict detected.").
 - **Conflicts Overview**: Mention the number of conflicts and any vehicles involved (e.g., "Number of conflicts: 1. Involved vehicles: Vehicle V1234 and Vehicle V5678.").
 - **Actions & Decisions**: Summarize any key decisions or actions taken (e.g., "Decisions: Vehicle V5678 must yield to Vehicle V1234.").
 - **Priority Assignment**: List the vehicles and their assigned priorities (e.g., "Vehicle V1234: Priority 1, Vehicle V5678: Priority 2.").
 - **Vehicle Waiting Times**: Provide waiting times for each vehicle (e.g., "Vehicle V1234: 5 seconds, Vehicle V5678: 10 seconds.").

**The output format must exactly follow this structure in case of conflict:**

**Conflict Status**: Conflict detected.
**Conflicts Overview**: Number of conflicts: <k>. Involved vehicles: Vehicle <a> and Vehicle <b>.
**Actions & Decisions**: Decisions: Potential conflict: Vehicle <b> must yield to Vehicle <a>
**Priority Assignment**: Vehicle <a>: Priority 1, Vehicle <b>: Priority 2.
**Vehicle Waiting Times**: - Vehicle <a>: 0 seconds - Vehicle <b>: 3 seconds)";

namespace detail {

inline std::string lane_bullet(const IntersectionLayout& layout, Direction d) {
  // East lanes "lead to"; the others "direct vehicles to".
  const std::string_view verb = d == Direction::east ? "leads to" : "directs vehicles to";
  std::vector<std::string> parts;
  for (LaneId lane : layout.lanes_for(d)) {
    std::vector<std::string> letters;
    for (Egress e : layout.destinations_for(lane)) letters.push_back(e.str());
    parts.push_back("Lane " + std::to_string(lane.value()) + " " + std::string(verb) + " " + join_english(letters));
  }
  return join(parts, ", ") + ".";
}

inline void replace_all(std::string& text, std::string_view slot, std::string_view value) {
  for (std::size_t pos = text.find(slot); pos != std::string::npos; pos = text.find(slot, pos + value.size())) {
    text.replace(pos, slot.size(), value);
  }
}

}  // namespace detail

inline std::string build_system_prompt(const IntersectionLayout& layout) {
  std::string text(kSystemPromptTemplate);
  detail::replace_all(text, "{north}", detail::lane_bullet(layout, Direction::north));
  detail::replace_all(text, "{east}", detail::lane_bullet(layout, Direction::east));
  detail::replace_all(text, "{south}", detail::lane_bullet(layout, Direction::south));
  detail::replace_all(text, "{west}", detail::lane_bullet(layout, Direction::west));
  return text;
}

struct PromptBundle {
  std::string system_text;
  std::string user_text;
  std::string expected_text;

  friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

inline PromptBundle build_bundle(const Scenario& scenario, const ConflictAnalysis& analysis,
                                 const IntersectionLayout& layout) {
  return {build_system_prompt(layout), describe_scenario(scenario), render_report(analysis)};
}

inline PromptBundle build_bundle(const Scenario& scenario, const IntersectionLayout& layout, const OracleConfig& cfg) {
  return build_bundle(scenario, analyze(scenario, layout, cfg), layout);
}

inline PromptBundle build_bundle(const LabeledScenario& item, const IntersectionLayout& layout) {
  return build_bundle(item.scenario, item.analysis, layout);
}

struct SplitRatios {
  double train = 0.7;
  double validation = 0.1;
  double test = 0.2;

  void validate() const {
    if (!(train > 0.0 && validation > 0.0 && test > 0.0)) throw ValidationError("split ratios must be positive");
    if (std::abs(train + validation + test - 1.0) > 1e-9) throw ValidationError("split ratios must sum to 1");
  }
};

/// Parses "0.7,0.1,0.2".
inline SplitRatios parse_split_ratios(std::string_view text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string field(text.substr(start, end - start));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      throw ValidationError("split: \"" + field + "\" is not a number");
    }
    if (used != field.size()) throw ValidationError("split: \"" + field + "\" is not a number");
    parts.push_back(v);
    start = end + 1;
  }
  if (parts.size() != 3) throw ValidationError("split: expected three comma-separated ratios");
  SplitRatios r{parts[0], parts[1], parts[2]};
  r.validate();
  return r;
}

template <typename T>
struct DatasetSplit {
  std::vector<T> train;
  std::vector<T> validation;
  std::vector<T> test;
  std::uint64_t seed = 0;
};

/// Seeded Fisher-Yates shuffle, then contiguous slices. Validation and test
/// get round(n * ratio) items; train takes the remainder.
template <typename T>
DatasetSplit<T> split_dataset(std::vector<T> items, const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();
  Rng rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.index(i)]);
  }
  const std::size_t n = items.size();
  std::size_t n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.validation));
  std::size_t n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.test));
  n_val = std::min(n_val, n);
  n_test = std::min(n_test, n - n_val);
  const std::size_t n_train = n - n_val - n_test;

  DatasetSplit<T> out;
  out.seed = seed;
  auto it = std::make_move_iterator(items.begin());
  out.train.assign(it, it + static_cast<std::ptrdiff_t>(n_train));
  out.validation.assign(it + static_cast<std::ptrdiff_t>(n_train), it + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test.assign(it + static_cast<std::ptrdiff_t>(n_train + n_val), std::make_move_iterator(items.end()));
  return out;
}

inline std::string bundle_to_jsonl_line(const PromptBundle& b) {
  nlohmann::ordered_json j{{"messages",
                            {{{"role", "system"}, {"content", b.system_text}},
                             {{"role", "user"}, {"content", b.user_text}},
                             {{"role", "assistant"}, {"content", b.expected_text}}}}};
  return j.dump() + "\n";
}

inline PromptBundle bundle_from_jsonl_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("jsonl: ") + e.what());
  }
  if (!j.is_object() || !j.contains("messages") || !j["messages"].is_array() || j["messages"].size() != 3) {
    throw ParseError("jsonl: expected {\"messages\": [system, user, assistant]}");
  }
  const char* roles[] = {"system", "user", "assistant"};
  std::string content[3];
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& m = j["messages"][i];
    if (!m.is_object() || m.value("role", "") != roles[i] || !m.contains("content") || !m["content"].is_string()) {
      throw ParseError(std::string("jsonl: message ") + std::to_string(i) + " must be a " + roles[i] + " message");
    }
    content[i] = m["content"].get<std::string>();
  }
  return {content[0], content[1], content[2]};
}

inline void export_jsonl(std::span<const PromptBundle> bundles, const std::filesystem::path& path) {
  std::string text;
  for (const auto& b : bundles) text += bundle_to_jsonl_line(b);
  io::write_file_atomic(path, text);
}

inline std::vector<PromptBundle> import_jsonl(const std::filesystem::path& path) {
  std::vector<PromptBundle> out;
  std::size_t line_no = 0;
  for (const auto& line : io::split_lines(io::read_file(path))) {
    ++line_no;
    try {
      out.push_back(bundle_from_jsonl_line(line));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace trafficllm
