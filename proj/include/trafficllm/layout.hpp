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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "trafficllm/error.hpp"

namespace trafficllm {

/// Compass heading of travel. A `north` vehicle travels northbound, so it
/// enters the junction from the south leg. Enumerators are in clockwise order.
enum class Direction : std::uint8_t { north = 0, east = 1, south = 2, west = 3 };

inline constexpr std::array<Direction, 4> kAllDirections{
    Direction::north, Direction::east, Direction::south, Direction::west};

constexpr Direction rotate_cw(Direction d) noexcept {
  return static_cast<Direction>((static_cast<int>(d) + 1) % 4);
}
constexpr Direction rotate_ccw(Direction d) noexcept {
  return static_cast<Direction>((static_cast<int>(d) + 3) % 4);
}
constexpr Direction opposite(Direction d) noexcept {
  return static_cast<Direction>((static_cast<int>(d) + 2) % 4);
}

constexpr bool is_perpendicular(Direction a, Direction b) noexcept {
  return rotate_cw(a) == b || rotate_ccw(a) == b;
}

inline std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::north: return "north";
    case Direction::east: return "east";
    case Direction::south: return "south";
    case Direction::west: return "west";
  }
  return "?";
}

inline std::optional<Direction> direction_from_string(std::string_view s) noexcept {
  for (Direction d : kAllDirections) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

enum class Movement : std::uint8_t { through, left, right };

inline std::string_view to_string(Movement m) noexcept {
  switch (m) {
    case Movement::through: return "through";
    case Movement::left: return "left";
    case Movement::right: return "right";
  }
  return "?";
}

/// Approach lane number, 1..8.
class LaneId {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 8;

  constexpr LaneId() = default;
  explicit constexpr LaneId(int value) : value_(value) {
    if (value < kMin || value > kMax) {
      throw ParseError("lane id out of range 1..8: " + std::to_string(value));
    }
  }

  constexpr int value() const noexcept { return value_; }
  constexpr std::size_t index() const noexcept { return static_cast<std::size_t>(value_ - 1); }
  constexpr bool is_odd() const noexcept { return value_ % 2 == 1; }

  /// Fixed binding: {1,2} north, {3,4} east, {5,6} south, {7,8} west.
  constexpr Direction bound_direction() const noexcept {
    return static_cast<Direction>((value_ - 1) / 2);
  }

  friend constexpr auto operator<=>(LaneId, LaneId) = default;

 private:
  int value_ = 1;
};

/// Egress (exit) lane letter, A..H.
class Egress {
 public:
  constexpr Egress() = default;
  explicit constexpr Egress(char letter) : letter_(letter) {
    if (letter < 'A' || letter > 'H') {
      throw ParseError(std::string("egress letter out of range A..H: '") + letter + "'");
    }
  }

  static Egress parse(std::string_view s) {
    if (s.size() != 1) throw ParseError("egress must be a single letter A..H, got \"" + std::string(s) + "\"");
    return Egress(s.front());
  }

  constexpr char letter() const noexcept { return letter_; }
  constexpr std::size_t index() const noexcept { return static_cast<std::size_t>(letter_ - 'A'); }
  std::string str() const { return std::string(1, letter_); }

  friend constexpr auto operator<=>(Egress, Egress) = default;

 private:
  char letter_ = 'A';
};

/// One lane record of a layout document.
struct LaneSpec {
  LaneId id;
  Direction direction = Direction::north;
  std::vector<Egress> destinations;

  friend bool operator==(const LaneSpec&, const LaneSpec&) = default;
};

/// Four-leg, eight-lane junction: lane bindings, lane reachability, and the
/// side of the junction each egress letter sits on.
///
/// Immutable once built; every instance satisfies the layout invariants
/// (non-empty egress sets, no U-turns, odd lanes through/right only, even
/// lanes through/left only).
class IntersectionLayout {
 public:
  /// Egress legs: north side {E,F}, east {G,H}, south {A,B}, west {C,D}.
  static constexpr std::array<Direction, 8> kEgressLegs{
      Direction::south, Direction::south, Direction::west, Direction::west,
      Direction::north, Direction::north, Direction::east, Direction::east};

  /// Validates and builds. Throws ValidationError naming the offending lane.
  static IntersectionLayout from_lanes(std::vector<LaneSpec> lanes) {
    if (lanes.size() != 8) {
      throw ValidationError("layout must define exactly 8 lanes, got " + std::to_string(lanes.size()));
    }
    IntersectionLayout layout;
    std::array<bool, 8> seen{};
    for (auto& lane : lanes) {
      const auto name = "lane " + std::to_string(lane.id.value());
      if (seen[lane.id.index()]) throw ValidationError(name + ": duplicate lane id");
      seen[lane.id.index()] = true;
      if (lane.direction != lane.id.bound_direction()) {
        throw ValidationError(name + ": bound to " + std::string(to_string(lane.id.bound_direction())) +
                              ", document says " + std::string(to_string(lane.direction)));
      }
      if (lane.destinations.empty()) throw ValidationError(name + ": empty destination set");
      std::array<bool, 8> seen_dest{};
      for (Egress e : lane.destinations) {
        if (seen_dest[e.index()]) throw ValidationError(name + ": duplicate destination " + e.str());
        seen_dest[e.index()] = true;
        const auto movement = movement_between(lane.direction, e);
        if (!movement) {
          throw ValidationError(name + ": destination " + e.str() + " is on the entry leg (U-turn)");
        }
        const bool allowed = *movement == Movement::through ||
                             (lane.id.is_odd() ? *movement == Movement::right : *movement == Movement::left);
        if (!allowed) {
          throw ValidationError(name + ": destination " + e.str() + " is a " + std::string(to_string(*movement)) +
                                " movement, not permitted for an " + (lane.id.is_odd() ? "odd" : "even") + " lane");
        }
      }
    }
    for (auto& lane : lanes) layout.lanes_[lane.id.index()] = std::move(lane);
    return layout;
  }

  const LaneSpec& lane(LaneId id) const noexcept { return lanes_[id.index()]; }
  const std::array<LaneSpec, 8>& lanes() const noexcept { return lanes_; }

  const std::vector<Egress>& destinations_for(LaneId id) const noexcept {
    return lanes_[id.index()].destinations;
  }

  bool permits(LaneId id, Egress destination) const noexcept {
    for (Egress e : destinations_for(id)) {
      if (e == destination) return true;
    }
    return false;
  }

  /// The two lanes serving a heading, ascending.
  std::array<LaneId, 2> lanes_for(Direction d) const noexcept {
    const int first = static_cast<int>(d) * 2 + 1;
    return {LaneId(first), LaneId(first + 1)};
  }

  static constexpr Direction egress_leg(Egress e) noexcept { return kEgressLegs[e.index()]; }

  /// Movement class of a heading/egress pair, or nullopt for a U-turn.
  static constexpr std::optional<Movement> movement_between(Direction heading, Egress destination) noexcept {
    const Direction leg = egress_leg(destination);
    if (leg == heading) return Movement::through;
    if (leg == rotate_ccw(heading)) return Movement::left;
    if (leg == rotate_cw(heading)) return Movement::right;
    return std::nullopt;
  }

  friend bool operator==(const IntersectionLayout&, const IntersectionLayout&) = default;

 private:
  IntersectionLayout() = default;
  std::array<LaneSpec, 8> lanes_{};
};

inline IntersectionLayout default_layout() {
  auto lane = [](int id, std::string_view letters) {
    LaneSpec spec{LaneId(id), LaneId(id).bound_direction(), {}};
    for (char c : letters) spec.destinations.emplace_back(c);
    return spec;
  };
  return IntersectionLayout::from_lanes({
      lane(1, "FH"), lane(2, "EDC"), lane(3, "HB"), lane(4, "GEF"),
      lane(5, "BD"), lane(6, "AGH"), lane(7, "DF"), lane(8, "BCA"),
  });
}

inline const std::vector<Egress>& destinations_for(const IntersectionLayout& layout, LaneId lane) {
  return layout.destinations_for(lane);
}

inline bool lane_permits(const IntersectionLayout& layout, LaneId lane, Egress destination) {
  return layout.permits(lane, destination);
}

/// Throws ValidationError("unreachable movement ...") for U-turn pairs.
inline Movement classify_movement(const IntersectionLayout&, Direction direction, Egress destination) {
  const auto m = IntersectionLayout::movement_between(direction, destination);
  if (!m) {
    throw ValidationError("unreachable movement: " + destination.str() + " lies on the entry leg of " +
                          std::string(to_string(direction)) + "bound traffic");
  }
  return *m;
}

inline std::string emit_layout(const IntersectionLayout& layout) {
  nlohmann::ordered_json lanes = nlohmann::ordered_json::array();
  for (const auto& lane : layout.lanes()) {
    nlohmann::ordered_json dests = nlohmann::ordered_json::array();
    for (Egress e : lane.destinations) dests.push_back(e.str());
    lanes.push_back({{"id", lane.id.value()}, {"direction", to_string(lane.direction)}, {"destinations", dests}});
  }
  return nlohmann::ordered_json{{"lanes", lanes}}.dump(2) + "\n";
}

inline IntersectionLayout parse_layout(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("layout: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("lanes") || !doc["lanes"].is_array()) {
    throw ParseError("layout: expected an object with a \"lanes\" array");
  }
  std::vector<LaneSpec> lanes;
  std::size_t i = 0;
  for (const auto& rec : doc["lanes"]) {
    const auto where = "layout: lanes[" + std::to_string(i++) + "]";
    if (!rec.is_object()) throw ParseError(where + ": expected an object");
    if (!rec.contains("id") || !rec["id"].is_number_integer()) throw ParseError(where + ".id: expected an integer");
    if (!rec.contains("direction") || !rec["direction"].is_string()) {
      throw ParseError(where + ".direction: expected a string");
    }
    if (!rec.contains("destinations") || !rec["destinations"].is_array()) {
      throw ParseError(where + ".destinations: expected an array");
    }
    LaneSpec spec;
    try {
      spec.id = LaneId(rec["id"].get<int>());
    } catch (const ParseError& e) {
      throw ParseError(where + ".id: " + e.what());
    }
    const auto dir = direction_from_string(rec["direction"].get<std::string>());
    if (!dir) throw ParseError(where + ".direction: unknown direction \"" + rec["direction"].get<std::string>() + "\"");
    spec.direction = *dir;
    for (const auto& d : rec["destinations"]) {
      if (!d.is_string()) throw ParseError(where + ".destinations: expected strings");
      try {
        spec.destinations.push_back(Egress::parse(d.get<std::string>()));
      } catch (const ParseError& e) {
        throw ParseError(where + ".destinations: " + e.what());
      }
    }
    lanes.push_back(std::move(spec));
  }
  return IntersectionLayout::from_lanes(std::move(lanes));
}

}  // namespace trafficllm
