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
#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "trafficllm/layout.hpp"

namespace trafficllm {
namespace {

std::string letters(const std::vector<Egress>& es) {
  std::string s;
  for (Egress e : es) s += e.letter();
  return s;
}

TEST(Layout, DefaultLaneListsMatchPublishedMap) {
  const auto layout = default_layout();
  const char* expected[] = {"FH", "EDC", "HB", "GEF", "BD", "AGH", "DF", "BCA"};
  for (int lane = 1; lane <= 8; ++lane) {
    EXPECT_EQ(letters(destinations_for(layout, LaneId(lane))), expected[lane - 1]) << "lane " << lane;
  }
}

TEST(Layout, EveryEgressReachableFromSomeLane) {
  const auto layout = default_layout();
  std::string seen;
  for (const auto& lane : layout.lanes()) seen += letters(lane.destinations);
  for (char c = 'A'; c <= 'H'; ++c) EXPECT_NE(seen.find(c), std::string::npos) << c;
}

TEST(Layout, LanePermits) {
  const auto layout = default_layout();
  EXPECT_TRUE(lane_permits(layout, LaneId(1), Egress('H')));
  EXPECT_FALSE(lane_permits(layout, LaneId(1), Egress('A')));
  EXPECT_TRUE(lane_permits(layout, LaneId(6), Egress('A')));
}

TEST(Layout, ClassifyMovementExamples) {
  const auto layout = default_layout();
  EXPECT_EQ(classify_movement(layout, Direction::north, Egress('D')), Movement::left);
  EXPECT_EQ(classify_movement(layout, Direction::north, Egress('F')), Movement::through);
  EXPECT_THROW(classify_movement(layout, Direction::east, Egress('C')), ValidationError);
  try {
    classify_movement(layout, Direction::east, Egress('C'));
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("unreachable movement"), std::string::npos);
  }
}

TEST(Layout, ClassificationMatchesHandTableOnAll32Pairs) {
  const auto layout = default_layout();
  int uturns = 0;
  for (Direction d : kAllDirections) {
    for (char c = 'A'; c <= 'H'; ++c) {
      const char ref = testing::reference_movement(std::string(to_string(d)), c);
      if (ref == 'U') {
        ++uturns;
        EXPECT_THROW(classify_movement(layout, d, Egress(c)), ValidationError);
        continue;
      }
      const Movement m = classify_movement(layout, d, Egress(c));
      const char got = m == Movement::through ? 'T' : m == Movement::left ? 'L' : 'R';
      EXPECT_EQ(got, ref) << to_string(d) << " -> " << c;
    }
  }
  EXPECT_EQ(uturns, 8);
}

TEST(Layout, LaneSetsRespectParityPermissions) {
  const auto layout = default_layout();
  int pairs = 0;
  for (const auto& lane : layout.lanes()) {
    for (Egress e : lane.destinations) {
      ++pairs;
      const Movement m = classify_movement(layout, lane.direction, e);
      if (lane.id.is_odd()) {
        EXPECT_NE(m, Movement::left) << "lane " << lane.id.value();
      } else {
        EXPECT_NE(m, Movement::right) << "lane " << lane.id.value();
      }
    }
  }
  EXPECT_EQ(pairs, 20);
}

TEST(Layout, RotationalSymmetryPreservesMovement) {
  const auto layout = default_layout();
  auto rotate_letter = [](char c) {
    const std::string from = "FHBDEGAC";
    const std::string to = "HBDFGACE";
    return to[from.find(c)];
  };
  for (Direction d : kAllDirections) {
    for (char c = 'A'; c <= 'H'; ++c) {
      const auto m = IntersectionLayout::movement_between(d, Egress(c));
      const auto r = IntersectionLayout::movement_between(rotate_cw(d), Egress(rotate_letter(c)));
      EXPECT_EQ(m, r) << to_string(d) << " " << c;
    }
  }
}

TEST(Layout, EmitParseRoundTrip) {
  const auto layout = default_layout();
  EXPECT_EQ(parse_layout(emit_layout(layout)), layout);
  EXPECT_NE(emit_layout(layout).find(R"("destinations": [
        "E",
        "D",
        "C"
      ])"),
            std::string::npos);
}

std::string doc_with_lane1(const std::string& lane1) {
  std::string doc = R"({"lanes":[)" + lane1;
  const char* rest[] = {
      R"({"id":2,"direction":"north","destinations":["E","D","C"]})",
      R"({"id":3,"direction":"east","destinations":["H","B"]})",
      R"({"id":4,"direction":"east","destinations":["G","E","F"]})",
      R"({"id":5,"direction":"south","destinations":["B","D"]})",
      R"({"id":6,"direction":"south","destinations":["A","G","H"]})",
      R"({"id":7,"direction":"west","destinations":["D","F"]})",
      R"({"id":8,"direction":"west","destinations":["B","C","A"]})"};
  for (const char* r : rest) doc += std::string(",") + r;
  return doc + "]}";
}

TEST(Layout, CustomLaneSetIsAccepted) {
  const auto layout = parse_layout(doc_with_lane1(R"({"id":1,"direction":"north","destinations":["G"]})"));
  EXPECT_EQ(letters(layout.destinations_for(LaneId(1))), "G");
}

TEST(Layout, OwnLegEgressIsValidationErrorNamingLane) {
  try {
    parse_layout(doc_with_lane1(R"({"id":1,"direction":"north","destinations":["A"]})"));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("lane 1"), std::string::npos) << e.what();
  }
}

TEST(Layout, ParityViolationIsValidationError) {
  // C is a left turn for northbound traffic; lane 1 is through/right only.
  EXPECT_THROW(parse_layout(doc_with_lane1(R"({"id":1,"direction":"north","destinations":["C"]})")), ValidationError);
}

TEST(Layout, LaneNineIsParseError) {
  EXPECT_THROW(parse_layout(doc_with_lane1(R"({"id":9,"direction":"north","destinations":["F"]})")), ParseError);
}

TEST(Layout, MalformedDocumentsAreParseErrors) {
  EXPECT_THROW(parse_layout("{"), ParseError);
  EXPECT_THROW(parse_layout(R"({"lanes": 3})"), ParseError);
  EXPECT_THROW(parse_layout(doc_with_lane1(R"({"id":1,"direction":"up","destinations":["F"]})")), ParseError);
  EXPECT_THROW(parse_layout(doc_with_lane1(R"({"id":1,"direction":"north","destinations":["Z"]})")), ParseError);
}

TEST(Layout, WrongLaneCountOrBindingIsValidationError) {
  EXPECT_THROW(parse_layout(R"({"lanes":[{"id":1,"direction":"north","destinations":["F"]}]})"), ValidationError);
  EXPECT_THROW(parse_layout(doc_with_lane1(R"({"id":1,"direction":"east","destinations":["G"]})")), ValidationError);
  EXPECT_THROW(parse_layout(doc_with_lane1(R"({"id":2,"direction":"north","destinations":["F"]})")), ValidationError);
}

}  // namespace
}  // namespace trafficllm
