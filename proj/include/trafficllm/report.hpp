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
#include <cctype>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trafficllm/oracle.hpp"

namespace trafficllm {

struct ReportSection {
  /// Lowercased, whitespace-collapsed header text, e.g. "conflicts overview".
  std::string name;
  std::string body;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string normalize_header(std::string_view s) {
  std::string out;
  for (char c : trim(s)) {
    const bool space = c == ' ' || c == '\t';
    if (space && (out.empty() || out.back() == ' ')) continue;
    out += space ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

inline const std::regex& header_regex() {
  // **Name**:  or  **Name:**  (extra closing asterisks tolerated)
  static const std::regex re(R"(\*\*[ \t]{0,8}([^*\n:]{1,60}?)[ \t]{0,8}(?::[ \t]{0,8}\*{2,8}|\*{2,8}[ \t]{0,8}:))");
  return re;
}

inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool end = (c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])));
    if (end) {
      auto s = trim(text.substr(start, i + 1 - start));
      if (!s.empty()) out.push_back(std::move(s));
      start = i + 1;
    }
  }
  auto tail = trim(text.substr(std::min(start, text.size())));
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

inline bool starts_with_word(std::string_view s, std::string_view word) {
  return s.starts_with(word) && (s.size() == word.size() || !std::isalpha(static_cast<unsigned char>(s[word.size()])));
}

}  // namespace detail

/// Splits text at bold `**Header**:` markers. Text before the first header
/// is dropped.
inline std::vector<ReportSection> split_sections(std::string_view text) {
  std::vector<ReportSection> out;
  const std::string s(text);
  std::sregex_iterator it(s.begin(), s.end(), detail::header_regex()), end;
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // header start, body start
  std::vector<std::string> names;
  for (; it != end; ++it) {
    spans.emplace_back(static_cast<std::size_t>(it->position(0)), static_cast<std::size_t>(it->position(0) + it->length(0)));
    names.push_back(detail::normalize_header((*it)[1].str()));
  }
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const std::size_t body_end = i + 1 < spans.size() ? spans[i + 1].first : s.size();
    out.push_back({names[i], detail::trim(std::string_view(s).substr(spans[i].second, body_end - spans[i].second))});
  }
  return out;
}

/// First section with the given normalized name.
inline const ReportSection* find_section(const std::vector<ReportSection>& sections, std::string_view name) {
  for (const auto& sec : sections) {
    if (sec.name == name) return &sec;
  }
  return nullptr;
}

enum class Verdict { yes, no, unparseable };

inline std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    case Verdict::unparseable: return "unparseable";
  }
  return "?";
}

struct ReportedWait {
  std::string vehicle_id;
  double seconds = 0.0;

  friend bool operator==(const ReportedWait&, const ReportedWait&) = default;
};

/// Structured view of free-form controller output. Fields the text does not
/// supply stay empty.
struct ControllerReport {
  Verdict verdict = Verdict::unparseable;
  std::vector<ConflictPair> pairs;
  std::vector<std::string> decisions;
  std::vector<RankEntry> priorities;
  std::vector<ReportedWait> waits;
  std::string raw_text;
};

inline Verdict parse_verdict(std::string_view status_body) {
  std::string s = detail::lower(status_body);
  s.erase(0, std::min(s.size(), s.find_first_not_of(" \t\r\n*-:\"'")));
  if (detail::starts_with_word(s, "no") || s.find("no conflict") != std::string::npos ||
      s.find("not detected") != std::string::npos || detail::starts_with_word(s, "none")) {
    return Verdict::no;
  }
  if (detail::starts_with_word(s, "yes") || s.find("detected") != std::string::npos) return Verdict::yes;
  return Verdict::unparseable;
}

namespace detail {

inline ControllerReport parse_report_unguarded(std::string_view text) {
  ControllerReport r;
  r.raw_text = std::string(text);
  const auto sections = split_sections(text);
  const auto* status = find_section(sections, "conflict status");
  if (status == nullptr) return r;
  r.verdict = parse_verdict(status->body);
  if (r.verdict == Verdict::unparseable) return r;

  static const std::regex pair_re(R"([Vv]ehicles?\s{1,8}(V\d{1,6})\s{1,8}and\s{1,8}(?:[Vv]ehicle\s{1,8})?(V\d{1,6}))");
  static const std::regex priority_re(R"([Vv]ehicle\s{1,8}(V\d{1,6})\s{0,8}:\s{0,8}[Pp]riority\s{0,8}(\d{1,6}))");
  static const std::regex wait_re(R"([Vv]ehicle\s{1,8}(V\d{1,6})\s{0,8}:\s{0,8}(\d{1,9}(?:\.\d{1,9})?)\s{0,8}seconds?)");

  std::string pair_source = r.raw_text;
  if (const auto* s = find_section(sections, "conflicts overview")) {
    pair_source = s->body;
  } else if (const auto* s2 = find_section(sections, "conflict analysis")) {
    pair_source = s2->body;
  }
  std::set<std::pair<std::string, std::string>> seen_pairs;
  for (std::sregex_iterator it(pair_source.begin(), pair_source.end(), pair_re), end; it != end; ++it) {
    std::string a = (*it)[1].str(), b = (*it)[2].str();
    if (a == b) continue;
    if (!seen_pairs.insert(std::minmax(a, b)).second) continue;
    r.pairs.push_back({std::move(a), std::move(b)});
  }

  bool had_decision_section = false;
  for (const auto& sec : sections) {
    if (sec.name != "actions & decisions" && sec.name != "decisions" && sec.name != "recommendations") continue;
    had_decision_section = true;
    std::string body = sec.body;
    if (body.starts_with("Decisions:")) body = detail::trim(std::string_view(body).substr(10));
    const auto low = detail::lower(body);
    if (low.empty() || low == "none" || low == "none.") continue;
    constexpr std::string_view marker = "Potential conflict:";
    if (body.find(marker) != std::string::npos) {
      std::size_t pos = body.find(marker);
      while (pos != std::string::npos) {
        const std::size_t next = body.find(marker, pos + marker.size());
        std::string piece = detail::trim(std::string_view(body).substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        while (!piece.empty() && (piece.back() == ',' || piece.back() == ' ')) piece.pop_back();
        r.decisions.push_back(std::move(piece));
        pos = next;
      }
    } else {
      for (auto& s : detail::split_sentences(body)) r.decisions.push_back(std::move(s));
    }
  }
  if (!had_decision_section) {
    for (auto& s : detail::split_sentences(r.raw_text)) {
      if (detail::lower(s).find("yield") != std::string::npos) r.decisions.push_back(std::move(s));
    }
  }

  std::set<std::string> seen;
  for (std::sregex_iterator it(r.raw_text.begin(), r.raw_text.end(), priority_re), end; it != end; ++it) {
    if (!seen.insert((*it)[1].str()).second) continue;
    r.priorities.push_back({(*it)[1].str(), std::stoi((*it)[2].str())});
  }
  seen.clear();
  for (std::sregex_iterator it(r.raw_text.begin(), r.raw_text.end(), wait_re), end; it != end; ++it) {
    if (!seen.insert((*it)[1].str()).second) continue;
    r.waits.push_back({(*it)[1].str(), std::stod((*it)[2].str())});
  }
  return r;
}

}  // namespace detail

/// Tolerant, total parse of controller output: any failure inside the
/// extractors degrades to an unparseable report carrying the raw text.
inline ControllerReport parse_report(std::string_view text) noexcept {
  try {
    return detail::parse_report_unguarded(text);
  } catch (...) {
    ControllerReport r;
    try {
      r.raw_text = std::string(text);
    } catch (...) {
    }
    return r;
  }
}

enum class UnparseablePolicy { negative, exclude };

/// Positive class is "conflict". nullopt means the item is excluded.
/// Unparseable reports bump `unparseable_count` whatever the policy.
inline std::optional<bool> verdict_label(const ControllerReport& report, UnparseablePolicy policy,
                                         std::size_t& unparseable_count) {
  switch (report.verdict) {
    case Verdict::yes: return true;
    case Verdict::no: return false;
    case Verdict::unparseable: break;
  }
  ++unparseable_count;
  if (policy == UnparseablePolicy::exclude) return std::nullopt;
  return false;
}

}  // namespace trafficllm
