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

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "trafficllm/trafficllm.hpp"

namespace trafficllm::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kOperationalFailure = 1, kInputInvalid = 2 };

template <typename T>
struct Range {
  T lo{};
  T hi{};
};

/// "LO..HI" or a single value.
template <typename T>
Range<T> parse_range(const std::string& text, const char* what) {
  auto to_num = [&](const std::string& s) -> T {
    std::size_t used = 0;
    T v{};
    try {
      if constexpr (std::is_integral_v<T>) {
        v = static_cast<T>(std::stoll(s, &used));
      } else {
        v = static_cast<T>(std::stod(s, &used));
      }
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) throw ValidationError(std::string(what) + ": cannot parse \"" + text + "\" as LO..HI");
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const T v = to_num(text);
    return {v, v};
  }
  return {to_num(text.substr(0, dots)), to_num(text.substr(dots + 2))};
}

struct CommonOptions {
  std::string layout_path;
  double window = OracleConfig{}.time_window_s;
  double tie_eps = OracleConfig{}.tie_epsilon_s;
  double gap = OracleConfig{}.clearance_gap_s;

  IntersectionLayout layout() const {
    return layout_path.empty() ? default_layout() : parse_layout(io::read_file(layout_path));
  }
  OracleConfig oracle() const {
    OracleConfig c{window, tie_eps, gap};
    c.validate();
    return c;
  }
};

inline nlohmann::ordered_json oracle_json(const OracleConfig& c) {
  return {{"window", c.time_window_s}, {"tie_eps", c.tie_epsilon_s}, {"gap", c.clearance_gap_s}};
}

inline std::vector<LabeledScenario> read_dataset(const fs::path& path, const IntersectionLayout& layout) {
  std::vector<LabeledScenario> items;
  std::size_t line_no = 0;
  for (const auto& line : io::split_lines(io::read_file(path))) {
    ++line_no;
    try {
      items.push_back(labeled_from_jsonl_line(line, layout));
    } catch (const Error& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (items.empty()) throw ValidationError(path.string() + ": dataset is empty");
  return items;
}

inline std::string dataset_text(std::span<const LabeledScenario> items) {
  std::string text;
  for (const auto& it : items) text += labeled_to_jsonl_line(it);
  return text;
}

class App {
 public:
  App(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Intersection conflict oracle and LLM-controller evaluation pipeline", "trafficllm"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kVersion));
    app.add_option("--layout", common_.layout_path, "Layout JSON document (default: built-in layout)");
    app.add_option("--window", common_.window, "Conflict time window, seconds")->capture_default_str();
    app.add_option("--tie-eps", common_.tie_eps, "Arrival tie slot width, seconds")->capture_default_str();
    app.add_option("--gap", common_.gap, "Clearance gap between conflicting entries, seconds")->capture_default_str();

    add_generate(app);
    add_detect(app);
    add_describe(app);
    add_prompt(app);
    add_export(app);
    add_evaluate(app);
    add_report(app);

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      out_ << app.help();
      return kOk;
    } catch (const CLI::CallForVersion&) {
      out_ << kVersion << "\n";
      return kOk;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n";
      return kInputInvalid;
    }

    try {
      return action_();
    } catch (const ValidationError& e) {
      err_ << "error: " << e.what() << "\n";
      return kInputInvalid;
    } catch (const ParseError& e) {
      err_ << "error: " << e.what() << "\n";
      return kInputInvalid;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return kOperationalFailure;
    }
  }

 private:
  void add_generate(CLI::App& app) {
    auto* cmd = app.add_subcommand("generate", "Generate a labeled scenario dataset");
    auto opts = std::make_shared<GenerateOptions>();
    cmd->add_option("--count", opts->count, "Number of scenarios")->capture_default_str();
    cmd->add_option("--vehicles", opts->vehicles, "Vehicle count range LO..HI")->capture_default_str();
    cmd->add_option("--speed", opts->speed, "Speed range km/h LO..HI")->capture_default_str();
    cmd->add_option("--distance", opts->distance, "Distance range m LO..HI")->capture_default_str();
    cmd->add_option("--balance", opts->balance, "Target fraction of conflict-positive scenarios");
    cmd->add_option("--seed", opts->seed, "Generator seed")->capture_default_str();
    cmd->add_option("--out", opts->out, "Output directory")->required();
    cmd->callback([this, opts] { action_ = [this, opts] { return cmd_generate(*opts); }; });
  }

  void add_detect(CLI::App& app) {
    auto* cmd = app.add_subcommand("detect", "Analyze one scenario document");
    auto opts = std::make_shared<FileOptions>();
    cmd->add_option("scenario", opts->input, "Scenario JSON file")->required();
    cmd->add_option("--out", opts->out, "Also write analysis.json and report.txt here");
    cmd->callback([this, opts] { action_ = [this, opts] { return cmd_detect(*opts); }; });
  }

  void add_describe(CLI::App& app) {
    auto* cmd = app.add_subcommand("describe", "Print the textual description of a scenario");
    auto opts = std::make_shared<FileOptions>();
    cmd->add_option("scenario", opts->input, "Scenario JSON file")->required();
    cmd->callback([this, opts] { action_ = [this, opts] { return cmd_describe(*opts); }; });
  }

  void add_prompt(CLI::App& app) {
    auto* cmd = app.add_subcommand("prompt", "Print the system prompt, or a full prompt bundle for a scenario");
    auto opts = std::make_shared<FileOptions>();
    cmd->add_option("scenario", opts->input, "Scenario JSON file");
    cmd->callback([this, opts] { action_ = [this, opts] { return cmd_prompt(*opts); }; });
  }

  void add_export(CLI::App& app) {
    auto* cmd = app.add_subcommand("export", "Split a labeled dataset and export chat fine-tuning JSONL");
    auto opts = std::make_shared<ExportOptions>();
    cmd->add_option("--dataset", opts->dataset, "Labeled dataset JSONL (from generate)")->required();
    cmd->add_option("--split", opts->split, "train,validation,test ratios")->capture_default_str();
    cmd->add_option("--seed", opts->seed, "Shuffle seed")->capture_default_str();
    cmd->add_option("--out", opts->out, "Output directory")->required();
    cmd->callback([this, opts] { action_ = [this, opts] { return cmd_export(*opts); }; });
  }

  void add_evaluate(CLI::App& app) {
    auto* cmd = app.add_subcommand("evaluate", "Score a controller against a labeled dataset");
    auto opts = std::make_shared<EvaluateOptions>();
    cmd->add_option("--dataset", opts->dataset, "Labeled dataset JSONL")->required();
    cmd->add_option("--controller", opts->controller,
                    "reference | mock:always-yes | mock:always-no | mock:FILE | remote")
        ->capture_default_str();
    cmd->add_option("--endpoint", opts->endpoint, "Chat-completions URL (remote)");
    cmd->add_option("--model", opts->model, "Model name (remote)");
    cmd->add_option("--replay", opts->replay, "Re-score a recorded transcript instead of calling the endpoint");
    cmd->add_option("--concurrency", opts->concurrency, "Max in-flight requests (remote)")->capture_default_str();
    cmd->add_option("--timeout", opts->timeout_s, "Per-request timeout, seconds (remote)")->capture_default_str();
    cmd->add_option("--retries", opts->retries, "Retries per request (remote)")->capture_default_str();
    cmd->add_option("--backoff-ms", opts->backoff_ms, "Initial retry backoff, milliseconds")->capture_default_str();
    cmd->add_option("--api-key-env", opts->api_key_env, "Environment variable with the bearer token")->capture_default_str();
    cmd->add_option("--unparseable", opts->unparseable, "negative | exclude")->capture_default_str();
    cmd->add_option("--seed", opts->seed, "Expected dataset seed (checked against the manifest)");
    cmd->add_option("--out", opts->out, "Output directory")->required();
    cmd->callback([this, opts] { action_ = [this, opts] { return cmd_evaluate(*opts); }; });
  }

  void add_report(CLI::App& app) {
    auto* cmd = app.add_subcommand("report", "Print the text table for an evaluation summary");
    auto opts = std::make_shared<FileOptions>();
    cmd->add_option("summary", opts->input, "summary.json from evaluate")->required();
    cmd->callback([this, opts] { action_ = [this, opts] { return cmd_report(*opts); }; });
  }

  struct GenerateOptions {
    std::size_t count = 10000;
    std::string vehicles = "2..8";
    std::string speed = "20..80";
    std::string distance = "50..450";
    std::optional<double> balance;
    std::uint64_t seed = 42;
    std::string out;
  };

  struct FileOptions {
    std::string input;
    std::string out;
  };

  struct ExportOptions {
    std::string dataset;
    std::string split = "0.7,0.1,0.2";
    std::uint64_t seed = 42;
    std::string out;
  };

  struct EvaluateOptions {
    std::string dataset;
    std::string controller = "reference";
    std::string endpoint;
    std::string model;
    std::string replay;
    std::size_t concurrency = 4;
    double timeout_s = 60.0;
    int retries = 3;
    long backoff_ms = 500;
    std::string api_key_env = "TRAFFICLLM_API_KEY";
    std::string unparseable = "negative";
    std::optional<std::uint64_t> seed;
    std::string out;
  };

  int cmd_generate(const GenerateOptions& o) {
    const auto layout = common_.layout();
    const auto oracle = common_.oracle();
    GenParams p;
    const auto counts = parse_range<int>(o.vehicles, "--vehicles");
    const auto speed = parse_range<double>(o.speed, "--speed");
    const auto dist = parse_range<double>(o.distance, "--distance");
    p.min_vehicles = counts.lo;
    p.max_vehicles = counts.hi;
    p.speed_lo_kmh = speed.lo;
    p.speed_hi_kmh = speed.hi;
    p.distance_lo_m = dist.lo;
    p.distance_hi_m = dist.hi;
    p.conflict_balance = o.balance;
    p.seed = o.seed;
    p.validate();
    if (o.count < 1) throw ValidationError("--count must be >= 1");

    const auto items = generate_dataset(p, o.count, layout, oracle);
    const auto text = dataset_text(items);
    const auto positives = count_positive(items);

    nlohmann::ordered_json params{{"count", o.count},
                                  {"vehicles", {p.min_vehicles, p.max_vehicles}},
                                  {"speed_kmh", {p.speed_lo_kmh, p.speed_hi_kmh}},
                                  {"distance_m", {p.distance_lo_m, p.distance_hi_m}},
                                  {"balance", o.balance ? nlohmann::ordered_json(*o.balance) : nlohmann::ordered_json()}};
    const auto layout_text = emit_layout(layout);
    nlohmann::ordered_json manifest{
        {"tool", "trafficllm"},
        {"version", kVersion},
        {"command", "generate"},
        {"seed", o.seed},
        {"params", params},
        {"oracle", oracle_json(oracle)},
        {"layout_hash", io::fnv1a_hex(layout_text)},
        {"config_hash", io::fnv1a_hex(params.dump() + oracle_json(oracle).dump() + layout_text + std::to_string(o.seed))},
        {"count", items.size()},
        {"positives", positives},
        {"positive_fraction", static_cast<double>(positives) / static_cast<double>(items.size())},
        {"dataset_file", "dataset.jsonl"},
        {"dataset_hash", io::fnv1a_hex(text)}};

    const fs::path out(o.out);
    io::write_file_atomic(out / "dataset.jsonl", text);
    io::write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
    out_ << "wrote " << items.size() << " scenarios (" << positives << " with conflicts) to " << (out / "dataset.jsonl").string()
         << "\n";
    return kOk;
  }

  int cmd_detect(const FileOptions& o) {
    const auto layout = common_.layout();
    const auto scenario = parse_scenario(io::read_file(o.input), layout);
    const auto analysis = analyze(scenario, layout, common_.oracle());
    const auto json = analysis_to_json(analysis).dump(2);
    const auto report = render_report(analysis);
    out_ << json << "\n\n" << report << "\n";
    if (!o.out.empty()) {
      io::write_file_atomic(fs::path(o.out) / "analysis.json", json + "\n");
      io::write_file_atomic(fs::path(o.out) / "report.txt", report + "\n");
    }
    return kOk;
  }

  int cmd_describe(const FileOptions& o) {
    const auto layout = common_.layout();
    out_ << describe_scenario(parse_scenario(io::read_file(o.input), layout)) << "\n";
    return kOk;
  }

  int cmd_prompt(const FileOptions& o) {
    const auto layout = common_.layout();
    if (o.input.empty()) {
      out_ << build_system_prompt(layout) << "\n";
      return kOk;
    }
    const auto bundle = build_bundle(parse_scenario(io::read_file(o.input), layout), layout, common_.oracle());
    out_ << nlohmann::ordered_json{{"system", bundle.system_text}, {"user", bundle.user_text}, {"expected", bundle.expected_text}}.dump(2)
         << "\n";
    return kOk;
  }

  int cmd_export(const ExportOptions& o) {
    const auto layout = common_.layout();
    const auto ratios = parse_split_ratios(o.split);
    auto items = read_dataset(o.dataset, layout);
    const auto total = items.size();
    const auto split = split_dataset(std::move(items), ratios, o.seed);
    const fs::path out(o.out);
    auto write_part = [&](const char* name, const std::vector<LabeledScenario>& part) {
      std::vector<PromptBundle> bundles;
      bundles.reserve(part.size());
      for (const auto& it : part) bundles.push_back(build_bundle(it, layout));
      export_jsonl(bundles, out / (std::string(name) + ".jsonl"));
      io::write_file_atomic(out / (std::string(name) + ".labeled.jsonl"), dataset_text(part));
    };
    write_part("train", split.train);
    write_part("validation", split.validation);
    write_part("test", split.test);
    nlohmann::ordered_json manifest{{"tool", "trafficllm"},
                                    {"version", kVersion},
                                    {"command", "export"},
                                    {"seed", o.seed},
                                    {"source", o.dataset},
                                    {"ratios", {ratios.train, ratios.validation, ratios.test}},
                                    {"total", total},
                                    {"train", split.train.size()},
                                    {"validation", split.validation.size()},
                                    {"test", split.test.size()}};
    io::write_file_atomic(out / "split_manifest.json", manifest.dump(2) + "\n");
    out_ << "train " << split.train.size() << ", validation " << split.validation.size() << ", test " << split.test.size()
         << " written to " << out.string() << "\n";
    return kOk;
  }

  void check_manifest_seed(const EvaluateOptions& o) {
    if (!o.seed) return;
    const auto manifest_path = fs::path(o.dataset).parent_path() / "manifest.json";
    if (!fs::exists(manifest_path)) {
      err_ << "warning: no manifest next to " << o.dataset << "; cannot check --seed\n";
      return;
    }
    const auto j = nlohmann::json::parse(io::read_file(manifest_path), nullptr, false);
    if (j.is_discarded() || !j.contains("seed") || !j["seed"].is_number_unsigned()) {
      err_ << "warning: " << manifest_path.string() << " has no usable seed\n";
      return;
    }
    if (j["seed"].get<std::uint64_t>() != *o.seed) {
      err_ << "warning: dataset manifest seed " << j["seed"].get<std::uint64_t>() << " differs from --seed " << *o.seed
           << "; proceeding\n";
    }
  }

  std::unique_ptr<Controller> make_controller(const EvaluateOptions& o, const IntersectionLayout& layout) {
    const auto& c = o.controller;
    if (!o.replay.empty()) return std::make_unique<ReplayController>(ReplayController::from_file(o.replay));
    if (c == "reference") return std::make_unique<ReferenceController>(layout, common_.oracle());
    if (c == "mock:always-no") {
      return std::make_unique<MockController>(
          "**Conflict Status**: No conflict detected.\n**Conflicts Overview**: Number of conflicts: 0. Involved vehicles: None.\n"
          "**Actions & Decisions**: Decisions: None");
    }
    if (c == "mock:always-yes") return std::make_unique<MockController>("**Conflict Status**: Conflict detected.");
    if (c.starts_with("mock:")) return std::make_unique<MockController>(io::read_file(c.substr(5)));
    if (c == "remote") {
      RemoteConfig rc;
      rc.endpoint = o.endpoint;
      rc.model = o.model;
      rc.timeout = std::chrono::milliseconds(static_cast<long long>(o.timeout_s * 1000.0));
      rc.max_concurrency = o.concurrency;
      rc.max_retries = o.retries;
      rc.backoff_base = std::chrono::milliseconds(o.backoff_ms);
      rc.api_key_env = o.api_key_env;
      return std::make_unique<RemoteController>(rc);
    }
    throw ValidationError("--controller: unknown controller \"" + c + "\"");
  }

  int cmd_evaluate(const EvaluateOptions& o) {
    const auto layout = common_.layout();
    EvalConfig cfg;
    if (o.unparseable == "negative") {
      cfg.unparseable = UnparseablePolicy::negative;
    } else if (o.unparseable == "exclude") {
      cfg.unparseable = UnparseablePolicy::exclude;
    } else {
      throw ValidationError("--unparseable must be negative or exclude");
    }
    check_manifest_seed(o);
    const auto corpus = read_dataset(o.dataset, layout);
    auto controller = make_controller(o, layout);
    const auto requests = make_requests(corpus, layout);
    const auto outcomes = controller->assess_all(requests);

    const fs::path out(o.out);
    if (o.controller == "remote" && o.replay.empty()) {
      io::write_file_atomic(out / "transcript.jsonl", transcript_to_jsonl(make_transcript(requests, outcomes, o.model)));
    }
    const auto summary = score_outcomes(corpus, outcomes, cfg);
    auto json = summary_to_json(summary);
    json["controller"] = o.replay.empty() ? o.controller : o.controller + " (replay)";
    json["dataset"] = o.dataset;
    io::write_file_atomic(out / "summary.json", json.dump(2) + "\n");
    io::write_file_atomic(out / "summary.txt", summary_to_text(summary));
    io::write_file_atomic(out / "rows.csv", rows_to_csv(summary));
    out_ << summary_to_text(summary);
    return kOk;
  }

  int cmd_report(const FileOptions& o) {
    const auto j = nlohmann::json::parse(io::read_file(o.input), nullptr, false);
    if (j.is_discarded()) throw ParseError(o.input + ": not valid JSON");
    out_ << summary_to_text(summary_from_json(j));
    return kOk;
  }

  std::ostream& out_;
  std::ostream& err_;
  CommonOptions common_;
  std::function<int()> action_;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  App app(out, err);
  return app.run(argc, argv);
}

/// Convenience for in-process callers: argv[0] is supplied.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  args.insert(args.begin(), "trafficllm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace trafficllm::cli
