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

#include <cstdint>
#include <string>
#include <vector>

#include "trafficllm/trafficllm.hpp"

#ifndef TRAFFICLLM_TEST_DATA_DIR
#error "TRAFFICLLM_TEST_DATA_DIR must be defined"
#endif

namespace trafficllm::testing {

inline std::string data_path(const std::string& name) { return std::string(TRAFFICLLM_TEST_DATA_DIR) + "/" + name; }

inline std::string read_data(const std::string& name) { return io::read_file(data_path(name)); }

inline Vehicle make_vehicle(std::string id, int lane, double speed, double distance, std::string direction,
                            std::string destination) {
  return validate_vehicle({std::move(id), lane, speed, distance, std::move(direction), std::move(destination)},
                          default_layout());
}

/// The four vehicles of the worked output example (V7155, V6439, V5182, V2432).
inline Scenario table3_scenario() {
  return Scenario({make_vehicle("V7155", 2, 30.86, 88.54, "north", "D"),
                   make_vehicle("V6439", 3, 53.37, 107.50, "east", "B"),
                   make_vehicle("V5182", 7, 47.69, 94.67, "west", "D"),
                   make_vehicle("V2432", 1, 46.17, 74.59, "north", "H")});
}

/// Uniform over every legal (lane, destination) combination with the given
/// arrival time, at a fixed 36 km/h so distance = 10 * arrival.
inline Vehicle vehicle_arriving_at(const std::string& id, int lane, char destination, double arrival_s) {
  const auto& layout = default_layout();
  return validate_vehicle({id, lane, 36.0, 10.0 * arrival_s, std::string(to_string(LaneId(lane).bound_direction())),
                           std::string(1, destination)},
                          layout);
}

/// Random valid vehicle drawn without going through generate_scenario.
inline Vehicle random_vehicle(Rng& rng, const std::string& id, double speed_lo = 5.0, double speed_hi = 120.0,
                              double dist_lo = 1.0, double dist_hi = 600.0) {
  static const IntersectionLayout layout = default_layout();
  const int lane = static_cast<int>(rng.uniform_int(1, 8));
  const auto& dests = layout.destinations_for(LaneId(lane));
  const Egress dest = dests[rng.index(dests.size())];
  return validate_vehicle({id, lane, rng.uniform_real(speed_lo, speed_hi), rng.uniform_real(dist_lo, dist_hi),
                           std::string(to_string(LaneId(lane).bound_direction())), dest.str()},
                          layout);
}

inline Scenario random_scenario(Rng& rng, std::size_t n) {
  std::vector<Vehicle> vs;
  for (std::size_t i = 0; i < n; ++i) vs.push_back(random_vehicle(rng, "V" + std::to_string(100 + i)));
  return Scenario(std::move(vs));
}

}  // namespace trafficllm::testing
