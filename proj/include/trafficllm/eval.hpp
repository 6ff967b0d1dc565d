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
#include <array>
#include <bit>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "trafficllm/controller.hpp"
#include "trafficllm/dataset.hpp"
#include "trafficllm/error.hpp"
#include "trafficllm/format.hpp"
#include "trafficllm/report.hpp"

namespace trafficllm {

// ---------------------------------------------------------------------------
// Classification metrics. Positive class = "conflict".

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix confusion(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  if (predicted.size() != truth.size()) {
    throw ValidationError("confusion: " + std::to_string(predicted.size()) + " predictions vs " +
                          std::to_string(truth.size()) + " labels");
  }
  if (predicted.empty()) throw ValidationError("confusion: no labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      predicted[i] ? ++cm.tp : ++cm.fn;
    } else {
      predicted[i] ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Set when the metric's denominator was zero and it was defined as 0.
  bool precision_degenerate = false;
  bool recall_degenerate = false;
  bool f1_degenerate = false;
};

inline Metrics metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ValidationError("metrics: empty confusion matrix");
  Metrics m;
  const auto d = [](std::size_t x) { return static_cast<double>(x); };
  m.accuracy = d(cm.tp + cm.tn) / d(cm.total());
  if (cm.tp + cm.fp == 0) {
    m.precision_degenerate = true;
  } else {
    m.precision = d(cm.tp) / d(cm.tp + cm.fp);
  }
  if (cm.tp + cm.fn == 0) {
    m.recall_degenerate = true;
  } else {
    m.recall = d(cm.tp) / d(cm.tp + cm.fn);
  }
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.f1_degenerate = true;
  }
  return m;
}

// ---------------------------------------------------------------------------
// ROUGE-L (sentence-level LCS, beta = 1).

/// Lowercased alphanumeric runs; a '.' between two digits stays inside the
/// token so decimals survive whole.
inline std::vector<std::string> rouge_tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  const auto is_alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  const auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (is_alnum(c)) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (c == '.' && !cur.empty() && is_digit(cur.back()) && i + 1 < text.size() && is_digit(text[i + 1])) {
      cur += c;
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

/// A reference token list prepared for repeated LCS queries. References of
/// up to 64 tokens use the bit-parallel row update (Hyyro 2004), one machine
/// word per candidate token; longer ones fall back to a rolling-row DP.
template <typename T>
class LcsReference {
 public:
  explicit LcsReference(std::span<const T> reference) : ref_(reference) {
    if (ref_.size() > kWord) return;
    for (std::size_t j = 0; j < ref_.size(); ++j) {
      std::size_t r = 0;
      while (r < n_distinct_ && !(*distinct_[r] == ref_[j])) ++r;
      if (r == n_distinct_) {
        distinct_[n_distinct_] = &ref_[j];
        where_[n_distinct_++] = 0;
      }
      where_[r] |= std::uint64_t{1} << j;
    }
  }

  std::span<const T> tokens() const noexcept { return ref_; }

  std::size_t lcs(std::span<const T> candidate) const {
    if (ref_.size() > kWord) return rolling_lcs(candidate);
    const std::uint64_t used = ref_.size() == kWord ? ~std::uint64_t{0} : (std::uint64_t{1} << ref_.size()) - 1;
    std::uint64_t v = ~std::uint64_t{0};
    for (const auto& x : candidate) {
      std::uint64_t match = 0;
      for (std::size_t r = 0; r < n_distinct_; ++r) {
        match |= where_[r] & (std::uint64_t{0} - static_cast<std::uint64_t>(x == *distinct_[r]));
      }
      const std::uint64_t u = v & match;
      v = (v + u) | (v - u);
    }
    return static_cast<std::size_t>(std::popcount(~v & used));
  }

 private:
  static constexpr std::size_t kWord = 64;

  std::size_t rolling_lcs(std::span<const T> candidate) const {
    std::vector<std::size_t> row(ref_.size() + 1, 0);
    for (const auto& x : candidate) {
      std::size_t diag = 0;
      for (std::size_t j = 1; j <= ref_.size(); ++j) {
        const std::size_t up = row[j];
        row[j] = x == ref_[j - 1] ? diag + 1 : std::max(up, row[j - 1]);
        diag = up;
      }
    }
    return row[ref_.size()];
  }

  std::span<const T> ref_;
  // Each distinct reference token and the bitmask of its positions.
  std::array<const T*, kWord> distinct_;
  std::array<std::uint64_t, kWord> where_;
  std::size_t n_distinct_ = 0;
};

template <typename T>
std::size_t lcs_length(std::span<const T> a, std::span<const T> b) {
  if (a.size() < b.size()) std::swap(a, b);
  return LcsReference<T>(b).lcs(a);
}

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  std::size_t lcs = 0;
};

/// Scores any number of candidates against one reference.
template <typename T>
class RougeReference {
 public:
  explicit RougeReference(std::span<const T> reference) : lcs_(reference) {}

  RougeScore score(std::span<const T> candidate) const {
    RougeScore s;
    const std::size_t n_ref = lcs_.tokens().size();
    if (candidate.empty() || n_ref == 0) return s;
    s.lcs = lcs_.lcs(candidate);
    s.precision = static_cast<double>(s.lcs) / static_cast<double>(candidate.size());
    s.recall = static_cast<double>(s.lcs) / static_cast<double>(n_ref);
    if (s.precision + s.recall > 0.0) s.f = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
  }

 private:
  LcsReference<T> lcs_;
};

template <typename T>
RougeScore rouge_l_tokens(std::span<const T> candidate, std::span<const T> reference) {
  return RougeReference<T>(reference).score(candidate);
}

inline RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
  const auto c = rouge_tokenize(candidate);
  const auto r = rouge_tokenize(reference);
  return rouge_l_tokens<std::string>(c, r);
}

// ---------------------------------------------------------------------------
// Per-section scoring.

inline constexpr std::array<std::string_view, 4> kScoredSections{
    "conflicts overview", "actions & decisions", "priority assignment", "vehicle waiting times"};

using SectionScores = std::array<RougeScore, 4>;

/// Aligns sections by header name; a section the candidate lacks scores 0.
inline SectionScores section_scores(std::string_view candidate_text, std::string_view truth_text) {
  const auto cand = split_sections(candidate_text);
  const auto truth = split_sections(truth_text);
  SectionScores out{};
  for (std::size_t i = 0; i < kScoredSections.size(); ++i) {
    const auto* c = find_section(cand, kScoredSections[i]);
    const auto* t = find_section(truth, kScoredSections[i]);
    if (c == nullptr || t == nullptr) continue;
    out[i] = rouge_l(c->body, t->body);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus evaluation.

struct EvalConfig {
  UnparseablePolicy unparseable = UnparseablePolicy::negative;
};

struct ScenarioRow {
  std::string scenario_id;
  bool truth = false;
  /// nullopt: transport failure or excluded unparseable output.
  std::optional<bool> prediction;
  Verdict verdict = Verdict::unparseable;
  bool transport_error = false;
  std::array<double, 4> section_f{};
};

struct EvalSummary {
  ConfusionMatrix cm;
  Metrics metrics;
  /// Mean F over assessed scenarios, in kScoredSections order.
  std::array<double, 4> section_means{};
  std::size_t scenarios = 0;
  std::size_t assessed = 0;
  std::size_t unparseable = 0;
  std::size_t transport_errors = 0;
  std::size_t excluded = 0;
  std::vector<ScenarioRow> rows;
};

/// Scores index-aligned controller outcomes against the labeled corpus.
inline EvalSummary score_outcomes(std::span<const LabeledScenario> corpus, std::span<const AssessOutcome> outcomes,
                                  const EvalConfig& cfg) {
  if (corpus.empty()) throw ValidationError("evaluate: empty corpus");
  if (outcomes.size() != corpus.size()) throw ValidationError("evaluate: outcome count does not match corpus");
  EvalSummary s;
  s.scenarios = corpus.size();
  std::vector<bool> pred, truth;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    ScenarioRow row;
    row.scenario_id = corpus[i].id;
    row.truth = corpus[i].analysis.is_conflict();
    if (!outcomes[i].text) {
      row.transport_error = true;
      ++s.transport_errors;
      s.rows.push_back(std::move(row));
      continue;
    }
    ++s.assessed;
    const auto report = parse_report(*outcomes[i].text);
    row.verdict = report.verdict;
    row.prediction = verdict_label(report, cfg.unparseable, s.unparseable);
    if (row.prediction) {
      pred.push_back(*row.prediction);
      truth.push_back(row.truth);
    } else {
      ++s.excluded;
    }
    const auto scores = section_scores(*outcomes[i].text, render_report(corpus[i].analysis));
    for (std::size_t k = 0; k < scores.size(); ++k) {
      row.section_f[k] = scores[k].f;
      s.section_means[k] += scores[k].f;
    }
    s.rows.push_back(std::move(row));
  }
  if (s.assessed == 0) throw TransportError("", "evaluate: every scenario failed (" + std::to_string(s.transport_errors) + " transport errors)");
  for (auto& m : s.section_means) m /= static_cast<double>(s.assessed);
  if (pred.empty()) throw ValidationError("evaluate: every assessed scenario was excluded as unparseable");
  s.cm = confusion(pred, truth);
  s.metrics = metrics(s.cm);
  return s;
}

inline std::vector<AssessRequest> make_requests(std::span<const LabeledScenario> corpus, const IntersectionLayout& layout) {
  std::vector<AssessRequest> out;
  out.reserve(corpus.size());
  for (const auto& item : corpus) out.push_back(make_request(item, layout));
  return out;
}

inline EvalSummary evaluate_corpus(Controller& controller, std::span<const LabeledScenario> corpus,
                                   const IntersectionLayout& layout, const EvalConfig& cfg) {
  if (corpus.empty()) throw ValidationError("evaluate: empty corpus");
  const auto requests = make_requests(corpus, layout);
  const auto outcomes = controller.assess_all(requests);
  return score_outcomes(corpus, outcomes, cfg);
}

inline nlohmann::ordered_json summary_to_json(const EvalSummary& s) {
  using oj = nlohmann::ordered_json;
  oj sections = oj::object();
  for (std::size_t k = 0; k < kScoredSections.size(); ++k) sections[std::string(kScoredSections[k])] = s.section_means[k];
  return oj{{"confusion", {{"tp", s.cm.tp}, {"fp", s.cm.fp}, {"fn", s.cm.fn}, {"tn", s.cm.tn}}},
            {"metrics",
             {{"accuracy", s.metrics.accuracy},
              {"precision", s.metrics.precision},
              {"recall", s.metrics.recall},
              {"f1", s.metrics.f1},
              {"precision_degenerate", s.metrics.precision_degenerate},
              {"recall_degenerate", s.metrics.recall_degenerate},
              {"f1_degenerate", s.metrics.f1_degenerate}}},
            {"rouge_l_f_mean", sections},
            {"diagnostics",
             {{"scenarios", s.scenarios},
              {"assessed", s.assessed},
              {"unparseable", s.unparseable},
              {"excluded", s.excluded},
              {"transport_errors", s.transport_errors}}}};
}

/// Inverse of summary_to_json for the aggregate fields (rows are not stored).
template <typename Json>
EvalSummary summary_from_json(const Json& j) {
  try {
    EvalSummary s;
    const auto& c = j.at("confusion");
    s.cm = {c.at("tp").template get<std::size_t>(), c.at("fp").template get<std::size_t>(),
            c.at("fn").template get<std::size_t>(), c.at("tn").template get<std::size_t>()};
    const auto& m = j.at("metrics");
    s.metrics.accuracy = m.at("accuracy").template get<double>();
    s.metrics.precision = m.at("precision").template get<double>();
    s.metrics.recall = m.at("recall").template get<double>();
    s.metrics.f1 = m.at("f1").template get<double>();
    s.metrics.precision_degenerate = m.value("precision_degenerate", false);
    s.metrics.recall_degenerate = m.value("recall_degenerate", false);
    s.metrics.f1_degenerate = m.value("f1_degenerate", false);
    const auto& r = j.at("rouge_l_f_mean");
    for (std::size_t k = 0; k < kScoredSections.size(); ++k) {
      s.section_means[k] = r.at(std::string(kScoredSections[k])).template get<double>();
    }
    const auto& d = j.at("diagnostics");
    s.scenarios = d.at("scenarios").template get<std::size_t>();
    s.assessed = d.at("assessed").template get<std::size_t>();
    s.unparseable = d.at("unparseable").template get<std::size_t>();
    s.excluded = d.at("excluded").template get<std::size_t>();
    s.transport_errors = d.at("transport_errors").template get<std::size_t>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("summary: ") + e.what());
  }
}

inline std::string summary_to_text(const EvalSummary& s) {
  std::string out;
  out += "metric                  value\n";
  out += "----------------------  --------\n";
  auto line = [&](std::string_view name, const std::string& value) {
    std::string n(name);
    n.resize(std::max<std::size_t>(n.size(), 22), ' ');
    out += n + "  " + value + "\n";
  };
  line("accuracy", fixed(s.metrics.accuracy, 4));
  line("precision", fixed(s.metrics.precision, 4) + (s.metrics.precision_degenerate ? " (degenerate)" : ""));
  line("recall", fixed(s.metrics.recall, 4) + (s.metrics.recall_degenerate ? " (degenerate)" : ""));
  line("f1", fixed(s.metrics.f1, 4) + (s.metrics.f1_degenerate ? " (degenerate)" : ""));
  line("tp / fp / fn / tn", std::to_string(s.cm.tp) + " / " + std::to_string(s.cm.fp) + " / " +
                                std::to_string(s.cm.fn) + " / " + std::to_string(s.cm.tn));
  for (std::size_t k = 0; k < kScoredSections.size(); ++k) {
    line("rouge-l " + std::string(kScoredSections[k]), fixed(s.section_means[k], 4));
  }
  line("scenarios", std::to_string(s.scenarios));
  line("unparseable", std::to_string(s.unparseable));
  line("excluded", std::to_string(s.excluded));
  line("transport errors", std::to_string(s.transport_errors));
  return out;
}

inline std::string rows_to_csv(const EvalSummary& s) {
  std::string out = "scenario_id,truth,prediction,verdict,overview_f,decisions_f,priority_f,waits_f\n";
  for (const auto& r : s.rows) {
    out += r.scenario_id + "," + (r.truth ? "yes" : "no") + ",";
    out += r.transport_error ? "error" : (r.prediction ? (*r.prediction ? "yes" : "no") : "excluded");
    out += ",";
    out += r.transport_error ? "none" : std::string(to_string(r.verdict));
    for (double f : r.section_f) out += "," + fixed(f, 6);
    out += "\n";
  }
  return out;
}

}  // namespace trafficllm
