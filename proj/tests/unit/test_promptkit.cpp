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

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "support/fixtures.hpp"
#include "trafficllm/promptkit.hpp"

namespace trafficllm {
namespace {

namespace fs = std::filesystem;

TEST(PromptKit, SystemPromptCarriesLaneBulletsVerbatim) {
  const auto prompt = build_system_prompt(default_layout());
  EXPECT_TRUE(prompt.starts_with("You are an Urban Intersection Traffic Conflict Detector"));
  EXPECT_NE(prompt.find("- North: Lane 1 directs vehicles to F and H, Lane 2 directs vehicles to E, D, and C.\n"),
            std::string::npos);
  EXPECT_NE(prompt.find("- East: Lane 3 leads to H and B, Lane 4 leads to G, E, and F.\n"), std::string::npos);
  EXPECT_NE(prompt.find("- South: Lane 5 directs vehicles to B and D, Lane 6 directs vehicles to A, G, and H.\n"),
            std::string::npos);
  EXPECT_NE(prompt.find("- West: Lane 7 directs vehicles to D and F, Lane 8 directs vehicles to B, C, and A.\n"),
            std::string::npos);
  EXPECT_EQ(prompt.find('{'), std::string::npos);
  EXPECT_EQ(prompt.find("****"), std::string::npos);
  for (const char* header : {"**Conflict Status**", "**Conflicts Overview**", "**Actions & Decisions**",
                             "**Priority Assignment**", "**Vehicle Waiting Times**"}) {
    EXPECT_NE(prompt.find(header), std::string::npos) << header;
  }
}

TEST(PromptKit, SystemPromptFollowsCustomLayout) {
  auto text = emit_layout(default_layout());
  const std::string from = R"("destinations": [
        "F",
        "H"
      ])";
  text.replace(text.find(from), from.size(), R"("destinations": ["G"])");
  const auto prompt = build_system_prompt(parse_layout(text));
  EXPECT_NE(prompt.find("- North: Lane 1 directs vehicles to G, Lane 2"), std::string::npos);
}

TEST(PromptKit, BundleFields) {
  const auto s = testing::table3_scenario();
  const auto b = build_bundle(s, default_layout(), OracleConfig{});
  EXPECT_EQ(b.system_text, build_system_prompt(default_layout()));
  EXPECT_EQ(b.user_text, describe_scenario(s));
  EXPECT_EQ(b.expected_text, render_report(analyze(s, default_layout(), OracleConfig{})));
}

TEST(PromptKit, JsonlLineShapeAndRoundTrip) {
  const auto b = build_bundle(testing::table3_scenario(), default_layout(), OracleConfig{});
  const auto line = bundle_to_jsonl_line(b);
  EXPECT_TRUE(line.starts_with(R"({"messages":[{"role":"system","content":"You are)"));
  EXPECT_NE(line.find(R"({"role":"user","content":"Vehicle V7155 is in lane 2)"), std::string::npos);
  EXPECT_NE(line.find(R"({"role":"assistant","content":"**Conflict Status**: Conflict detected.\n)"), std::string::npos);
  EXPECT_EQ(line.back(), '\n');
  EXPECT_EQ(std::count(line.begin(), line.end(), '\n'), 1);
  EXPECT_EQ(bundle_from_jsonl_line(line), b);
}

TEST(PromptKit, JsonlRejectsWrongShapes) {
  EXPECT_THROW(bundle_from_jsonl_line("{"), ParseError);
  EXPECT_THROW(bundle_from_jsonl_line(R"({"messages":[]})"), ParseError);
  EXPECT_THROW(bundle_from_jsonl_line(
                   R"({"messages":[{"role":"user","content":"a"},{"role":"user","content":"b"},{"role":"assistant","content":"c"}]})"),
               ParseError);
}

TEST(PromptKit, ExportImportFile) {
  const auto dir = fs::temp_directory_path() / "trafficllm_promptkit_test";
  fs::remove_all(dir);
  Rng rng(8);
  std::vector<PromptBundle> bundles;
  for (int i = 0; i < 20; ++i) {
    bundles.push_back(build_bundle(testing::random_scenario(rng, 3), default_layout(), OracleConfig{}));
  }
  export_jsonl(bundles, dir / "nested" / "out.jsonl");
  EXPECT_EQ(import_jsonl(dir / "nested" / "out.jsonl"), bundles);
  fs::remove_all(dir);
}

TEST(PromptKit, SplitRatiosParsing) {
  const auto r = parse_split_ratios("0.7,0.1,0.2");
  EXPECT_DOUBLE_EQ(r.train, 0.7);
  EXPECT_THROW(parse_split_ratios("0.7,0.1"), ValidationError);
  EXPECT_THROW(parse_split_ratios("0.7,0.2,0.2"), ValidationError);
  EXPECT_THROW(parse_split_ratios("0.9,0.1,0"), ValidationError);
  EXPECT_THROW(parse_split_ratios("a,b,c"), ValidationError);
  EXPECT_THROW(parse_split_ratios("0.7x,0.1,0.2"), ValidationError);
}

TEST(PromptKit, SplitSizesAndPartition) {
  std::vector<int> items(10000);
  for (int i = 0; i < 10000; ++i) items[static_cast<std::size_t>(i)] = i;
  const auto split = split_dataset(items, SplitRatios{}, 42);
  EXPECT_EQ(split.train.size(), 7000u);
  EXPECT_EQ(split.validation.size(), 1000u);
  EXPECT_EQ(split.test.size(), 2000u);
  std::set<int> all(split.train.begin(), split.train.end());
  all.insert(split.validation.begin(), split.validation.end());
  all.insert(split.test.begin(), split.test.end());
  EXPECT_EQ(all.size(), 10000u);
  EXPECT_NE(split.train[0], 0);
}

TEST(PromptKit, SplitIsDeterministicPerSeed) {
  std::vector<int> items(500);
  for (int i = 0; i < 500; ++i) items[static_cast<std::size_t>(i)] = i;
  const auto a = split_dataset(items, SplitRatios{}, 1);
  const auto b = split_dataset(items, SplitRatios{}, 1);
  const auto c = split_dataset(items, SplitRatios{}, 2);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.train, c.train);
}

TEST(PromptKit, SplitOfTinyCorpus) {
  const auto split = split_dataset(std::vector<int>{1, 2, 3}, SplitRatios{}, 0);
  EXPECT_EQ(split.train.size() + split.validation.size() + split.test.size(), 3u);
}

}  // namespace
}  // namespace trafficllm
