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
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "trafficllm/error.hpp"
#include "trafficllm/format.hpp"
#include "trafficllm/layout.hpp"
#include "trafficllm/random.hpp"

namespace trafficllm {

/// Unvalidated vehicle record as read from a scenario document.
struct VehicleRecord {
  std::string vehicle_id;
  int lane = 0;
  double speed = 0.0;
  double distance_to_intersection = 0.0;
  std::string direction;
  std::string destination;
};

struct Vehicle {
  std::string id;
  LaneId lane;
  double speed_kmh = 0.0;
  double distance_m = 0.0;
  Direction direction = Direction::north;
  Egress destination;

  friend bool operator==(const Vehicle&, const Vehicle&) = default;
};

struct ArrivalEstimate {
  std::string vehicle_id;
  double arrival_time_s = 0.0;
};

/// `V` followed by 1 to 6 digits.
inline bool is_valid_vehicle_id(std::string_view id) noexcept {
  if (id.size() < 2 || id.size() > 7 || id.front() != 'V') return false;
  for (char c : id.substr(1)) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

inline Vehicle validate_vehicle(const VehicleRecord& raw, const IntersectionLayout& layout) {
  const auto who = "vehicle " + (raw.vehicle_id.empty() ? std::string("<unnamed>") : raw.vehicle_id);
  if (!is_valid_vehicle_id(raw.vehicle_id)) {
    throw ValidationError(who + ": vehicle_id must match V followed by 1-6 digits");
  }
  if (!(raw.speed > 0.0) || !std::isfinite(raw.speed)) {
    throw ValidationError(who + ": speed must be a positive finite number of km/h, got " + fixed(raw.speed, 6));
  }
  if (!(raw.distance_to_intersection > 0.0) || !std::isfinite(raw.distance_to_intersection)) {
    throw ValidationError(who + ": distance_to_intersection must be a positive finite number of meters, got " +
                          fixed(raw.distance_to_intersection, 6));
  }
  if (raw.lane < LaneId::kMin || raw.lane > LaneId::kMax) {
    throw ValidationError(who + ": lane must be in 1..8, got " + std::to_string(raw.lane));
  }
  const auto direction = direction_from_string(raw.direction);
  if (!direction) throw ValidationError(who + ": direction \"" + raw.direction + "\" is not north/east/south/west");
  const LaneId lane(raw.lane);
  const Direction bound = layout.lane(lane).direction;
  if (bound != *direction) {
    throw ValidationError(who + ": lane " + std::to_string(raw.lane) + " serves " + std::string(to_string(bound)) +
                          "bound traffic, not " + raw.direction);
  }
  if (raw.destination.size() != 1 || raw.destination[0] < 'A' || raw.destination[0] > 'H') {
    throw ValidationError(who + ": destination \"" + raw.destination + "\" is not an egress letter A..H");
  }
  const Egress destination(raw.destination[0]);
  if (!layout.permits(lane, destination)) {
    throw ValidationError(who + ": destination " + raw.destination + " is not permitted from lane " +
                          std::to_string(raw.lane));
  }
  return Vehicle{raw.vehicle_id, lane, raw.speed, raw.distance_to_intersection, *direction, destination};
}

/// Seconds to reach the stop line at constant speed: d / (v / 3.6).
inline double arrival_seconds(const Vehicle& v) noexcept { return v.distance_m / (v.speed_kmh / 3.6); }

inline ArrivalEstimate arrival_time(const Vehicle& v) { return {v.id, arrival_seconds(v)}; }

/// Non-empty list of vehicles with pairwise distinct ids.
class Scenario {
 public:
  static constexpr std::size_t kMaxVehicles = 64;

  Scenario() = default;

  explicit Scenario(std::vector<Vehicle> vehicles) : vehicles_(std::move(vehicles)) {
    if (vehicles_.empty()) throw ValidationError("scenario: at least one vehicle is required");
    if (vehicles_.size() > kMaxVehicles) {
      throw ValidationError("scenario: at most " + std::to_string(kMaxVehicles) + " vehicles are supported");
    }
    std::set<std::string_view> ids;
    for (const auto& v : vehicles_) {
      if (!ids.insert(v.id).second) throw ValidationError("scenario: duplicate vehicle_id " + v.id);
    }
  }

  const std::vector<Vehicle>& vehicles() const noexcept { return vehicles_; }
  std::size_t size() const noexcept { return vehicles_.size(); }

  friend bool operator==(const Scenario&, const Scenario&) = default;

 private:
  std::vector<Vehicle> vehicles_;
};

struct GenParams {
  int min_vehicles = 2;
  int max_vehicles = 8;
  double speed_lo_kmh = 20.0;
  double speed_hi_kmh = 80.0;
  double distance_lo_m = 50.0;
  double distance_hi_m = 450.0;
  /// Target fraction of conflict-positive scenarios in a dataset.
  std::optional<double> conflict_balance;
  std::uint64_t seed = 0;

  void validate() const {
    if (min_vehicles < 1) throw ValidationError("vehicle count minimum must be >= 1");
    if (max_vehicles < min_vehicles) throw ValidationError("vehicle count range is empty");
    if (static_cast<std::size_t>(max_vehicles) > Scenario::kMaxVehicles) {
      throw ValidationError("vehicle count maximum exceeds " + std::to_string(Scenario::kMaxVehicles));
    }
    if (!(speed_lo_kmh > 0.0) || !(speed_lo_kmh < speed_hi_kmh) || !std::isfinite(speed_hi_kmh)) {
      throw ValidationError("speed range must satisfy 0 < lo < hi");
    }
    if (!(distance_lo_m > 0.0) || !(distance_lo_m < distance_hi_m) || !std::isfinite(distance_hi_m)) {
      throw ValidationError("distance range must satisfy 0 < lo < hi");
    }
    if (conflict_balance && !(*conflict_balance >= 0.0 && *conflict_balance <= 1.0)) {
      throw ValidationError("conflict balance must lie in [0, 1]");
    }
  }
};

inline Scenario generate_scenario(const GenParams& params, const IntersectionLayout& layout, Rng& rng) {
  params.validate();
  const auto count = static_cast<std::size_t>(rng.uniform_int(params.min_vehicles, params.max_vehicles));
  std::vector<Vehicle> vehicles;
  vehicles.reserve(count);
  std::set<std::string> used;
  while (vehicles.size() < count) {
    Vehicle v;
    do {
      v.id = "V" + std::to_string(rng.uniform_int(1000, 9999));
    } while (!used.insert(v.id).second);
    v.direction = kAllDirections[rng.index(4)];
    v.lane = layout.lanes_for(v.direction)[rng.index(2)];
    const auto& dests = layout.destinations_for(v.lane);
    v.destination = dests[rng.index(dests.size())];
    v.speed_kmh = rng.uniform_real(params.speed_lo_kmh, params.speed_hi_kmh);
    v.distance_m = rng.uniform_real(params.distance_lo_m, params.distance_hi_m);
    vehicles.push_back(std::move(v));
  }
  return Scenario(std::move(vehicles));
}

inline nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& v : s.vehicles()) {
    list.push_back({{"vehicle_id", v.id},
                    {"lane", std::to_string(v.lane.value())},
                    {"speed", v.speed_kmh},
                    {"distance_to_intersection", v.distance_m},
                    {"direction", to_string(v.direction)},
                    {"destination", v.destination.str()}});
  }
  return {{"vehicles_scenario", list}};
}

template <typename Json>
Scenario scenario_from_json(const Json& doc, const IntersectionLayout& layout) {
  if (!doc.is_object() || !doc.contains("vehicles_scenario") || !doc["vehicles_scenario"].is_array()) {
    throw ParseError("scenario: expected an object with a \"vehicles_scenario\" array");
  }
  std::vector<Vehicle> vehicles;
  std::size_t i = 0;
  for (const auto& rec : doc["vehicles_scenario"]) {
    const auto where = "scenario: vehicles_scenario[" + std::to_string(i++) + "]";
    if (!rec.is_object()) throw ParseError(where + ": expected an object");
    auto field = [&](const char* key) -> const Json& {
      if (!rec.contains(key)) throw ParseError(where + ": missing field \"" + key + "\"");
      return rec[key];
    };
    VehicleRecord raw;
    const auto& id = field("vehicle_id");
    if (!id.is_string()) throw ParseError(where + ".vehicle_id: expected a string");
    raw.vehicle_id = id.template get<std::string>();
    const auto& lane = field("lane");
    if (lane.is_number_integer()) {
      raw.lane = lane.template get<int>();
    } else if (lane.is_string()) {
      const auto s = lane.template get<std::string>();
      if (s.empty() || s.size() > 3 || s.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError(where + ".lane: \"" + s + "\" is not a lane number");
      }
      raw.lane = std::stoi(s);
    } else {
      throw ParseError(where + ".lane: expected a string or integer");
    }
    const auto& speed = field("speed");
    const auto& dist = field("distance_to_intersection");
    if (!speed.is_number()) throw ParseError(where + ".speed: expected a number");
    if (!dist.is_number()) throw ParseError(where + ".distance_to_intersection: expected a number");
    raw.speed = speed.template get<double>();
    raw.distance_to_intersection = dist.template get<double>();
    const auto& dir = field("direction");
    const auto& dest = field("destination");
    if (!dir.is_string()) throw ParseError(where + ".direction: expected a string");
    if (!dest.is_string()) throw ParseError(where + ".destination: expected a string");
    raw.direction = dir.template get<std::string>();
    raw.destination = dest.template get<std::string>();
    vehicles.push_back(validate_vehicle(raw, layout));
  }
  return Scenario(std::move(vehicles));
}

inline Scenario parse_scenario(std::string_view text, const IntersectionLayout& layout) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  return scenario_from_json(doc, layout);
}

inline std::string emit_scenario(const Scenario& s) { return scenario_to_json(s).dump(); }

inline std::string describe_vehicle(const Vehicle& v) {
  return "Vehicle " + v.id + " is in lane " + std::to_string(v.lane.value()) + ", moving " +
         std::string(to_string(v.direction)) + " at a speed of " + fixed(v.speed_kmh, 2) + " km/h, and is " +
         fixed(v.distance_m, 2) + " meters away from the intersection, heading towards " + v.destination.str() + ".";
}

/// One sentence per vehicle, input order, single-space separated.
inline std::string describe_scenario(const Scenario& s) {
  std::string out;
  for (const auto& v : s.vehicles()) {
    if (!out.empty()) out += ' ';
    out += describe_vehicle(v);
  }
  return out;
}

}  // namespace trafficllm
