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
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

#include "trafficllm/error.hpp"
#include "trafficllm/oracle.hpp"
#include "trafficllm/scenario.hpp"

namespace trafficllm {

struct LabeledScenario {
  std::string id;
  Scenario scenario;
  ConflictAnalysis analysis;

  friend bool operator==(const LabeledScenario&, const LabeledScenario&) = default;
};

inline std::string scenario_item_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "S%06zu", index + 1);
  return buf;
}

/// Candidate k is drawn from an Rng seeded with params.seed + k, so any
/// candidate can be regenerated independently.
///
/// With a conflict balance, candidates are accepted only while their class
/// quota (round(balance * n) positives) is open; gives up after 100 * n
/// candidates.
inline std::vector<LabeledScenario> generate_dataset(const GenParams& params, std::size_t n,
                                                     const IntersectionLayout& layout, const OracleConfig& cfg) {
  params.validate();
  cfg.validate();
  if (n < 1) throw ValidationError("dataset size must be >= 1");

  std::vector<LabeledScenario> out;
  out.reserve(n);
  const std::size_t want_pos = params.conflict_balance
                                   ? static_cast<std::size_t>(std::llround(*params.conflict_balance * static_cast<double>(n)))
                                   : n;
  const std::size_t want_neg = params.conflict_balance ? n - want_pos : n;
  std::size_t pos = 0, neg = 0;
  const std::uint64_t budget = 100ULL * n;
  for (std::uint64_t k = 0; out.size() < n; ++k) {
    if (k >= budget) {
      const double achieved = out.empty() ? 0.0 : static_cast<double>(pos) / static_cast<double>(out.size());
      throw ValidationError("conflict balance unattainable: accepted " + std::to_string(out.size()) + " of " +
                            std::to_string(n) + " scenarios after " + std::to_string(budget) +
                            " candidates, positive fraction " + fixed(achieved, 4));
    }
    Rng rng(params.seed + k);
    Scenario s = generate_scenario(params, layout, rng);
    ConflictAnalysis a = analyze(s, layout, cfg);
    if (a.is_conflict()) {
      if (pos >= want_pos) continue;
      ++pos;
    } else {
      if (neg >= want_neg) continue;
      ++neg;
    }
    out.push_back({scenario_item_id(out.size()), std::move(s), std::move(a)});
  }
  return out;
}

inline std::size_t count_positive(const std::vector<LabeledScenario>& items) {
  std::size_t pos = 0;
  for (const auto& it : items) pos += it.analysis.is_conflict() ? 1 : 0;
  return pos;
}

/// One JSON object per line: {"id", "scenario", "analysis"}.
inline std::string labeled_to_jsonl_line(const LabeledScenario& item) {
  nlohmann::ordered_json j{{"id", item.id}, {"scenario", scenario_to_json(item.scenario)}, {"analysis", analysis_to_json(item.analysis)}};
  return j.dump() + "\n";
}

inline LabeledScenario labeled_from_jsonl_line(std::string_view line, const IntersectionLayout& layout) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw ParseError(std::string("dataset line: ") + e.what());
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("scenario") || !j.contains("analysis")) {
    throw ParseError("dataset line: expected {\"id\", \"scenario\", \"analysis\"}");
  }
  return {j["id"].get<std::string>(), scenario_from_json(j["scenario"], layout), analysis_from_json(j["analysis"])};
}

}  // namespace trafficllm
