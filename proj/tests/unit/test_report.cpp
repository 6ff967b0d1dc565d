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

#include "support/fixtures.hpp"
#include "trafficllm/report.hpp"

namespace trafficllm {
namespace {

TEST(Report, SplitsBothHeaderStyles) {
  const auto secs = split_sections("intro **Conflict Status:** Yes\n**Conflicts  Overview**: two\n**Other**:x");
  ASSERT_EQ(secs.size(), 3u);
  EXPECT_EQ(secs[0].name, "conflict status");
  EXPECT_EQ(secs[0].body, "Yes");
  EXPECT_EQ(secs[1].name, "conflicts overview");
  EXPECT_EQ(secs[1].body, "two");
  EXPECT_EQ(secs[2].body, "x");
}

TEST(Report, VerdictWording) {
  EXPECT_EQ(parse_verdict("Yes"), Verdict::yes);
  EXPECT_EQ(parse_verdict("Conflict detected."), Verdict::yes);
  EXPECT_EQ(parse_verdict("No"), Verdict::no);
  EXPECT_EQ(parse_verdict("No conflict detected."), Verdict::no);
  EXPECT_EQ(parse_verdict("Conflict not detected"), Verdict::no);
  EXPECT_EQ(parse_verdict("none"), Verdict::no);
  EXPECT_EQ(parse_verdict("Nothing to report"), Verdict::unparseable);
  EXPECT_EQ(parse_verdict(""), Verdict::unparseable);
  EXPECT_EQ(parse_verdict("maybe"), Verdict::unparseable);
}

TEST(Report, PublishedOutputOne) {
  const auto r = parse_report(testing::read_data("table5_output1.txt"));
  EXPECT_EQ(r.verdict, Verdict::yes);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].vehicle1_id, "V4625");
  EXPECT_EQ(r.pairs[0].vehicle2_id, "V1909");
  ASSERT_FALSE(r.decisions.empty());
  EXPECT_NE(r.decisions[0].find("V1909 yield to Vehicle V4625"), std::string::npos);
}

TEST(Report, PublishedOutputTwo) {
  const auto r = parse_report(testing::read_data("table5_output2.txt"));
  EXPECT_EQ(r.verdict, Verdict::yes);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].vehicle1_id, "V7019");
  EXPECT_EQ(r.pairs[0].vehicle2_id, "V5264");
}

TEST(Report, PublishedOutputThree) {
  const auto r = parse_report(testing::read_data("table5_output3.txt"));
  EXPECT_EQ(r.verdict, Verdict::no);
  EXPECT_TRUE(r.pairs.empty());
  EXPECT_TRUE(r.decisions.empty());
}

TEST(Report, RoundTripsRenderedReports) {
  const auto& layout = default_layout();
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = testing::random_scenario(rng, 1 + static_cast<std::size_t>(trial % 8));
    const auto a = analyze(s, layout, OracleConfig{});
    const auto r = parse_report(render_report(a));
    ASSERT_EQ(r.verdict, a.is_conflict() ? Verdict::yes : Verdict::no);
    EXPECT_EQ(r.pairs, a.conflict_vehicles);
    EXPECT_EQ(r.decisions, a.decisions);
    EXPECT_EQ(r.priorities, a.priority_order);
    ASSERT_EQ(r.waits.size(), a.waiting_times.size());
    for (std::size_t i = 0; i < r.waits.size(); ++i) {
      EXPECT_EQ(r.waits[i].vehicle_id, a.waiting_times[i].vehicle_id);
      EXPECT_EQ(r.waits[i].seconds, a.waiting_times[i].seconds);
    }
  }
}

TEST(Report, MissingStatusIsUnparseable) {
  const auto r = parse_report("The vehicles V1 and V2 might meet. Vehicle V1: Priority 1");
  EXPECT_EQ(r.verdict, Verdict::unparseable);
  EXPECT_TRUE(r.pairs.empty());
  EXPECT_TRUE(r.priorities.empty());
}

TEST(Report, ToleratesVariantsAndDuplicates) {
  const auto r = parse_report(
      "**Conflict Status:** Yes, conflict detected.\n"
      "**Conflicts Overview:** Vehicles V12 and V34 conflict; vehicle V34 and vehicle V12 again.\n"
      "**Priority Assignment**: Vehicle V12 : priority 1, Vehicle V34: Priority 2, Vehicle V12: Priority 9\n"
      "**Vehicle Waiting Times**: Vehicle V12: 0 seconds, Vehicle V34: 2.5 seconds");
  EXPECT_EQ(r.verdict, Verdict::yes);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.priorities, (std::vector<RankEntry>{{"V12", 1}, {"V34", 2}}));
  ASSERT_EQ(r.waits.size(), 2u);
  EXPECT_DOUBLE_EQ(r.waits[1].seconds, 2.5);
}

TEST(Report, ParserIsTotalOnHostileInput) {
  Rng rng(4);
  const std::string alphabet = "*: \nVv0123456789abcdefghijklmnopqrstuvwxyz.,-_";
  for (int trial = 0; trial < 1000; ++trial) {
    std::string s;
    const auto len = static_cast<std::size_t>(rng.uniform_int(0, 400));
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.index(alphabet.size())];
    if (trial % 3 == 0) s = "**Conflict Status**: yes " + s;
    const auto r = parse_report(s);
    EXPECT_EQ(r.raw_text, s);
  }
  EXPECT_NO_THROW(parse_report(std::string(200000, '*')));
  EXPECT_NO_THROW(parse_report("**Conflict Status**: yes " + std::string(100000, 'V')));
}

TEST(Report, UnparseablePolicy) {
  ControllerReport r;
  std::size_t n = 0;
  EXPECT_EQ(verdict_label(r, UnparseablePolicy::negative, n), std::optional<bool>(false));
  EXPECT_EQ(verdict_label(r, UnparseablePolicy::exclude, n), std::nullopt);
  EXPECT_EQ(n, 2u);
  r.verdict = Verdict::yes;
  EXPECT_EQ(verdict_label(r, UnparseablePolicy::exclude, n), std::optional<bool>(true));
  EXPECT_EQ(n, 2u);
}

}  // namespace
}  // namespace trafficllm
