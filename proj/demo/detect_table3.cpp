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
// Analyzes the four-vehicle worked example and prints its analysis and report.

#include <iostream>

#include "trafficllm/trafficllm.hpp"

int main() {
  using namespace trafficllm;
  const auto layout = default_layout();
  const Scenario scenario({
      validate_vehicle({"V7155", 2, 30.86, 88.54, "north", "D"}, layout),
      validate_vehicle({"V6439", 3, 53.37, 107.50, "east", "B"}, layout),
      validate_vehicle({"V5182", 7, 47.69, 94.67, "west", "D"}, layout),
      validate_vehicle({"V2432", 1, 46.17, 74.59, "north", "H"}, layout),
  });

  std::cout << describe_scenario(scenario) << "\n\n";
  for (const auto& v : scenario.vehicles()) {
    std::cout << v.id << " arrives in " << fixed(arrival_seconds(v), 4) << " s\n";
  }
  const auto analysis = analyze(scenario, layout, OracleConfig{});
  std::cout << "\n" << analysis_to_json(analysis).dump(2) << "\n\n" << render_report(analysis) << "\n";
  return analysis.number_of_conflicts() == 4 ? 0 : 1;
}
