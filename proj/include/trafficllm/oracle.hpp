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

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "trafficllm/error.hpp"
#include "trafficllm/layout.hpp"
#include "trafficllm/scenario.hpp"

namespace trafficllm {

struct OracleConfig {
  /// Two geometrically crossing vehicles conflict when their arrival times
  /// differ by at most this many seconds.
  double time_window_s = 5.0;
  /// Arrivals falling in the same tie_epsilon_s-wide slot count as simultaneous.
  double tie_epsilon_s = 0.5;
  /// Seconds a vehicle occupies the junction before a conflicting one may enter.
  double clearance_gap_s = 3.0;

  void validate() const {
    if (!(time_window_s > 0.0) || !std::isfinite(time_window_s)) throw ValidationError("time window must be > 0");
    if (!(tie_epsilon_s >= 0.0) || !std::isfinite(tie_epsilon_s)) throw ValidationError("tie epsilon must be >= 0");
    if (!(clearance_gap_s >= 0.0) || !std::isfinite(clearance_gap_s)) throw ValidationError("clearance gap must be >= 0");
  }

  friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

/// Paths can cross: never for the same heading, only with a left turn for
/// opposite headings, always for perpendicular headings.
inline bool paths_may_cross(const Vehicle& a, const Vehicle& b, const IntersectionLayout& layout) {
  if (a.direction == b.direction) return false;
  if (opposite(a.direction) == b.direction) {
    return classify_movement(layout, a.direction, a.destination) == Movement::left ||
           classify_movement(layout, b.direction, b.destination) == Movement::left;
  }
  return true;
}

inline bool pairwise_conflict(const Vehicle& a, const Vehicle& b, const IntersectionLayout& layout,
                              const OracleConfig& cfg) {
  return paths_may_cross(a, b, layout) && std::abs(arrival_seconds(a) - arrival_seconds(b)) <= cfg.time_window_s;
}

namespace detail {

constexpr int movement_rank(Movement m) noexcept {
  switch (m) {
    case Movement::through: return 0;
    case Movement::right: return 1;
    case Movement::left: return 2;
  }
  return 3;
}

// Right-hand precedence (west over north, south over west, east over south)
// laid out as a linear order; north over east is the one relation dropped.
constexpr int heading_rank(Direction d) noexcept {
  switch (d) {
    case Direction::east: return 0;
    case Direction::south: return 1;
    case Direction::west: return 2;
    case Direction::north: return 3;
  }
  return 4;
}

}  // namespace detail

/// Strict weak order over vehicles; `less` means `a` goes first.
///
/// Keys, most significant first: arrival slot (floor(t / tie_epsilon_s), or
/// the raw arrival time when the epsilon is zero), movement
/// (through, right, left), heading (right-hand rule), vehicle id.
inline std::strong_ordering priority_compare(const Vehicle& a, const Vehicle& b, const IntersectionLayout& layout,
                                             const OracleConfig& cfg) {
  const double ta = arrival_seconds(a);
  const double tb = arrival_seconds(b);
  if (cfg.tie_epsilon_s > 0.0) {
    const double sa = std::floor(ta / cfg.tie_epsilon_s);
    const double sb = std::floor(tb / cfg.tie_epsilon_s);
    if (sa != sb) return sa < sb ? std::strong_ordering::less : std::strong_ordering::greater;
  } else if (ta != tb) {
    return ta < tb ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  const int ma = detail::movement_rank(classify_movement(layout, a.direction, a.destination));
  const int mb = detail::movement_rank(classify_movement(layout, b.direction, b.destination));
  if (auto c = ma <=> mb; c != 0) return c;
  if (auto c = detail::heading_rank(a.direction) <=> detail::heading_rank(b.direction); c != 0) return c;
  return a.id <=> b.id;
}

/// Serialized loser first: vehicle1 yields to vehicle2.
struct ConflictPair {
  std::string vehicle1_id;
  std::string vehicle2_id;

  friend bool operator==(const ConflictPair&, const ConflictPair&) = default;
};

struct RankEntry {
  std::string vehicle_id;
  int rank = 0;

  friend bool operator==(const RankEntry&, const RankEntry&) = default;
};

struct WaitEntry {
  std::string vehicle_id;
  int seconds = 0;

  friend bool operator==(const WaitEntry&, const WaitEntry&) = default;
};

struct ConflictAnalysis {
  std::vector<ConflictPair> conflict_vehicles;
  std::vector<std::string> decisions;
  /// Ascending rank.
  std::vector<RankEntry> priority_order;
  /// Same vehicle order as priority_order.
  std::vector<WaitEntry> waiting_times;

  bool is_conflict() const noexcept { return !conflict_vehicles.empty(); }
  std::size_t number_of_conflicts() const noexcept { return conflict_vehicles.size(); }

  friend bool operator==(const ConflictAnalysis&, const ConflictAnalysis&) = default;
};

inline std::string yield_decision(const ConflictPair& p) {
  return "Potential conflict: Vehicle " + p.vehicle1_id + " must yield to Vehicle " + p.vehicle2_id;
}

/// Entry time of each vehicle, processed by rank: the later of its own arrival
/// and clearance_gap_s after every higher-ranked conflicting vehicle's entry.
/// Waits are (entry - arrival) rounded half up to whole seconds.
inline std::vector<WaitEntry> schedule_waits(const Scenario& scenario, const std::vector<ConflictPair>& conflicts,
                                             const std::vector<RankEntry>& priority_order, const OracleConfig& cfg) {
  std::map<std::string_view, const Vehicle*> by_id;
  for (const auto& v : scenario.vehicles()) by_id.emplace(v.id, &v);
  std::map<std::string_view, int> rank;
  for (const auto& r : priority_order) rank.emplace(r.vehicle_id, r.rank);
  if (rank.size() != by_id.size()) throw ValidationError("priority order must cover every vehicle exactly once");

  std::vector<RankEntry> ordered = priority_order;
  std::sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) { return x.rank < y.rank; });

  std::map<std::string_view, double> entry;
  std::vector<WaitEntry> waits;
  waits.reserve(ordered.size());
  for (const auto& r : ordered) {
    const auto it = by_id.find(r.vehicle_id);
    if (it == by_id.end()) throw ValidationError("priority order names unknown vehicle " + r.vehicle_id);
    const double arrival = arrival_seconds(*it->second);
    double enter = arrival;
    for (const auto& c : conflicts) {
      std::string_view other;
      if (c.vehicle1_id == r.vehicle_id) {
        other = c.vehicle2_id;
      } else if (c.vehicle2_id == r.vehicle_id) {
        other = c.vehicle1_id;
      } else {
        continue;
      }
      const auto rank_it = rank.find(other);
      if (rank_it == rank.end() || rank_it->second >= r.rank) continue;
      enter = std::max(enter, entry.at(other) + cfg.clearance_gap_s);
    }
    entry.emplace(r.vehicle_id, enter);
    waits.push_back({r.vehicle_id, static_cast<int>(std::floor(enter - arrival + 0.5))});
  }
  return waits;
}

inline ConflictAnalysis analyze(const Scenario& scenario, const IntersectionLayout& layout, const OracleConfig& cfg) {
  cfg.validate();
  const auto& vs = scenario.vehicles();
  const std::size_t n = vs.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return priority_compare(vs[i], vs[j], layout, cfg) < 0; });
  std::vector<int> rank(n);
  ConflictAnalysis out;
  for (std::size_t r = 0; r < n; ++r) {
    rank[order[r]] = static_cast<int>(r) + 1;
    out.priority_order.push_back({vs[order[r]].id, static_cast<int>(r) + 1});
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!pairwise_conflict(vs[i], vs[j], layout, cfg)) continue;
      const bool i_yields = rank[i] > rank[j];
      ConflictPair pair{i_yields ? vs[i].id : vs[j].id, i_yields ? vs[j].id : vs[i].id};
      out.decisions.push_back(yield_decision(pair));
      out.conflict_vehicles.push_back(std::move(pair));
    }
  }
  out.waiting_times = schedule_waits(scenario, out.conflict_vehicles, out.priority_order, cfg);
  return out;
}

inline nlohmann::ordered_json analysis_to_json(const ConflictAnalysis& a) {
  using oj = nlohmann::ordered_json;
  oj places = oj::array();
  oj pairs = oj::array();
  for (const auto& p : a.conflict_vehicles) {
    places.push_back("intersection");
    pairs.push_back({{"vehicle1_id", p.vehicle1_id}, {"vehicle2_id", p.vehicle2_id}});
  }
  oj priority = oj::object();
  for (const auto& r : a.priority_order) priority[r.vehicle_id] = r.rank;
  oj waits = oj::object();
  for (const auto& w : a.waiting_times) waits[w.vehicle_id] = w.seconds;
  return {{"is_conflict", a.is_conflict() ? "yes" : "no"},
          {"number_of_conflicts", a.number_of_conflicts()},
          {"places_of_conflicts", places},
          {"conflict_vehicles", pairs},
          {"decisions", a.decisions},
          {"priority_order", priority},
          {"waiting_times", waits}};
}

inline std::string emit_analysis(const ConflictAnalysis& a) { return analysis_to_json(a).dump(); }

/// Reads an analysis document and checks its internal consistency.
template <typename Json>
ConflictAnalysis analysis_from_json(const Json& doc) {
  auto need = [&](const char* key) -> const Json& {
    if (!doc.is_object() || !doc.contains(key)) throw ParseError(std::string("analysis: missing field \"") + key + "\"");
    return doc[key];
  };
  const auto& flag = need("is_conflict");
  if (!flag.is_string() || (flag != "yes" && flag != "no")) throw ParseError("analysis.is_conflict: expected \"yes\" or \"no\"");
  const auto& count = need("number_of_conflicts");
  if (!count.is_number_unsigned() && !count.is_number_integer()) throw ParseError("analysis.number_of_conflicts: expected an integer");
  const auto& places = need("places_of_conflicts");
  const auto& pairs = need("conflict_vehicles");
  const auto& decisions = need("decisions");
  const auto& priority = need("priority_order");
  const auto& waits = need("waiting_times");
  if (!places.is_array() || !pairs.is_array() || !decisions.is_array()) {
    throw ParseError("analysis: places_of_conflicts, conflict_vehicles and decisions must be arrays");
  }
  if (!priority.is_object() || !waits.is_object()) throw ParseError("analysis: priority_order and waiting_times must be objects");

  ConflictAnalysis a;
  for (const auto& p : pairs) {
    if (!p.is_object() || !p.contains("vehicle1_id") || !p.contains("vehicle2_id") || !p["vehicle1_id"].is_string() ||
        !p["vehicle2_id"].is_string()) {
      throw ParseError("analysis.conflict_vehicles: expected {vehicle1_id, vehicle2_id} strings");
    }
    a.conflict_vehicles.push_back({p["vehicle1_id"].template get<std::string>(), p["vehicle2_id"].template get<std::string>()});
  }
  for (const auto& d : decisions) {
    if (!d.is_string()) throw ParseError("analysis.decisions: expected strings");
    a.decisions.push_back(d.template get<std::string>());
  }
  for (const auto& [id, r] : priority.items()) {
    if (!r.is_number_integer()) throw ParseError("analysis.priority_order." + id + ": expected an integer");
    a.priority_order.push_back({id, r.template get<int>()});
  }
  for (const auto& [id, w] : waits.items()) {
    if (!w.is_number_integer()) throw ParseError("analysis.waiting_times." + id + ": expected an integer");
    a.waiting_times.push_back({id, w.template get<int>()});
  }

  if ((flag == "yes") != a.is_conflict()) throw ValidationError("analysis: is_conflict disagrees with conflict_vehicles");
  if (count.template get<long long>() != static_cast<long long>(a.number_of_conflicts())) {
    throw ValidationError("analysis: number_of_conflicts disagrees with conflict_vehicles");
  }
  if (places.size() != a.number_of_conflicts()) throw ValidationError("analysis: one place per conflict expected");
  if (a.decisions.size() != a.number_of_conflicts()) throw ValidationError("analysis: one decision per conflict expected");
  std::vector<int> ranks;
  for (const auto& r : a.priority_order) ranks.push_back(r.rank);
  std::sort(ranks.begin(), ranks.end());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] != static_cast<int>(i) + 1) throw ValidationError("analysis: priority_order is not a permutation of 1..n");
  }
  if (a.waiting_times.size() != a.priority_order.size()) throw ValidationError("analysis: waiting_times must cover every vehicle");
  return a;
}

inline ConflictAnalysis parse_analysis(std::string_view text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw ParseError(std::string("analysis: ") + e.what());
  }
  return analysis_from_json(doc);
}

/// Five-section controller report; one line per section.
inline std::string render_report(const ConflictAnalysis& a) {
  std::string out;
  out += a.is_conflict() ? "**Conflict Status**: Conflict detected.\n" : "**Conflict Status**: No conflict detected.\n";

  std::vector<std::string> involved;
  for (const auto& p : a.conflict_vehicles) involved.push_back("Vehicle " + p.vehicle1_id + " and Vehicle " + p.vehicle2_id);
  out += "**Conflicts Overview**: Number of conflicts: " + std::to_string(a.number_of_conflicts()) +
         ". Involved vehicles: " + (involved.empty() ? std::string("None") : join(involved, ", ")) + ".\n";

  out += "**Actions & Decisions**: Decisions: " + (a.decisions.empty() ? std::string("None") : join(a.decisions, ", ")) + "\n";

  std::vector<std::string> ranks;
  for (const auto& r : a.priority_order) ranks.push_back("Vehicle " + r.vehicle_id + ": Priority " + std::to_string(r.rank));
  out += "**Priority Assignment**: " + join(ranks, ", ") + ".\n";

  out += "**Vehicle Waiting Times**:";
  for (const auto& w : a.waiting_times) out += " - Vehicle " + w.vehicle_id + ": " + std::to_string(w.seconds) + " seconds";
  return out;
}

}  // namespace trafficllm
