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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "trafficllm/dataset.hpp"
#include "trafficllm/error.hpp"
#include "trafficllm/io.hpp"
#include "trafficllm/oracle.hpp"
#include "trafficllm/promptkit.hpp"

namespace trafficllm {

struct AssessRequest {
  std::string scenario_id;
  PromptBundle bundle;
  Scenario scenario;
};

inline AssessRequest make_request(const LabeledScenario& item, const IntersectionLayout& layout) {
  return {item.id, build_bundle(item, layout), item.scenario};
}

/// Either completion text or the error that prevented it.
struct AssessOutcome {
  std::optional<std::string> text;
  std::string error;
};

/// Anything that turns a prompt bundle into report text: the oracle itself,
/// a scripted stand-in, or a hosted model.
class Controller {
 public:
  virtual ~Controller() = default;

  virtual std::string name() const = 0;

  /// Throws TransportError when no text can be produced.
  virtual std::string assess(const AssessRequest& request) = 0;

  /// Results are index-aligned with `requests`.
  virtual std::vector<AssessOutcome> assess_all(std::span<const AssessRequest> requests) {
    std::vector<AssessOutcome> out(requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
      try {
        out[i].text = assess(requests[i]);
      } catch (const TransportError& e) {
        out[i].error = e.what();
      }
    }
    return out;
  }
};

/// Re-analyzes the scenario with the oracle and renders its report.
class ReferenceController final : public Controller {
 public:
  ReferenceController(IntersectionLayout layout, OracleConfig cfg) : layout_(std::move(layout)), cfg_(cfg) {}

  std::string name() const override { return "reference"; }

  std::string assess(const AssessRequest& request) override {
    return render_report(analyze(request.scenario, layout_, cfg_));
  }

 private:
  IntersectionLayout layout_;
  OracleConfig cfg_;
};

/// Scripted responses: per-scenario overrides, else a fixed fallback text.
class MockController final : public Controller {
 public:
  explicit MockController(std::string fallback) : fallback_(std::move(fallback)) {}
  MockController(std::map<std::string, std::string> by_scenario, std::string fallback)
      : by_scenario_(std::move(by_scenario)), fallback_(std::move(fallback)) {}

  std::string name() const override { return "mock"; }

  std::string assess(const AssessRequest& request) override {
    if (auto it = by_scenario_.find(request.scenario_id); it != by_scenario_.end()) return it->second;
    return fallback_;
  }

 private:
  std::map<std::string, std::string> by_scenario_;
  std::string fallback_;
};

/// One line of an audit transcript.
struct TranscriptRecord {
  std::size_t index = 0;
  std::string scenario_id;
  std::string model;
  std::optional<std::string> response;
  std::string error;

  friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

inline std::vector<TranscriptRecord> make_transcript(std::span<const AssessRequest> requests,
                                                     std::span<const AssessOutcome> outcomes,
                                                     const std::string& model) {
  std::vector<TranscriptRecord> out;
  for (std::size_t i = 0; i < requests.size() && i < outcomes.size(); ++i) {
    out.push_back({i, requests[i].scenario_id, model, outcomes[i].text, outcomes[i].error});
  }
  return out;
}

inline std::string transcript_to_jsonl(std::span<const TranscriptRecord> records) {
  std::string text;
  for (const auto& r : records) {
    nlohmann::ordered_json j{{"index", r.index}, {"scenario_id", r.scenario_id}, {"model", r.model}};
    if (r.response) {
      j["ok"] = true;
      j["response"] = *r.response;
    } else {
      j["ok"] = false;
      j["error"] = r.error;
    }
    text += j.dump() + "\n";
  }
  return text;
}

inline std::vector<TranscriptRecord> transcript_from_jsonl(std::string_view text) {
  std::vector<TranscriptRecord> out;
  std::size_t line_no = 0;
  for (const auto& line : io::split_lines(text)) {
    ++line_no;
    const auto where = "transcript line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("scenario_id") || !j["scenario_id"].is_string() || !j.contains("ok") ||
        !j["ok"].is_boolean()) {
      throw ParseError(where + ": expected {scenario_id, ok, response|error}");
    }
    TranscriptRecord r;
    r.index = j.value("index", out.size());
    r.scenario_id = j["scenario_id"].get<std::string>();
    r.model = j.value("model", "");
    if (j["ok"].get<bool>()) {
      if (!j.contains("response") || !j["response"].is_string()) throw ParseError(where + ": ok record without response");
      r.response = j["response"].get<std::string>();
    } else {
      r.error = j.value("error", "");
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Serves responses recorded in a transcript; never touches the network.
class ReplayController final : public Controller {
 public:
  explicit ReplayController(std::span<const TranscriptRecord> records) {
    for (const auto& r : records) records_.insert_or_assign(r.scenario_id, r);
  }

  static ReplayController from_file(const std::filesystem::path& path) {
    const auto records = transcript_from_jsonl(io::read_file(path));
    return ReplayController(records);
  }

  std::string name() const override { return "replay"; }

  std::string assess(const AssessRequest& request) override {
    const auto it = records_.find(request.scenario_id);
    if (it == records_.end()) throw TransportError(request.scenario_id, "not present in replay transcript");
    if (!it->second.response) throw TransportError(request.scenario_id, "recorded failure: " + it->second.error);
    return *it->second.response;
  }

 private:
  std::map<std::string, TranscriptRecord> records_;
};

}  // namespace trafficllm
