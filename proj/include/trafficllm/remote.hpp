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
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "trafficllm/controller.hpp"
#include "trafficllm/error.hpp"

namespace trafficllm {

struct RemoteConfig {
  /// Full URL of the chat-completions route, or a base URL to which
  /// "/v1/chat/completions" is appended.
  std::string endpoint;
  std::string model;
  std::chrono::milliseconds timeout{60000};
  std::size_t max_concurrency = 4;
  /// Retries after the first attempt.
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{500};
  /// Environment variable holding the bearer token; unset means no header.
  std::string api_key_env = "TRAFFICLLM_API_KEY";
  double temperature = 0.0;

  void validate() const {
    if (endpoint.empty()) throw ValidationError("remote: endpoint is required");
    if (timeout.count() <= 0) throw ValidationError("remote: timeout must be > 0");
    if (max_concurrency < 1) throw ValidationError("remote: concurrency must be >= 1");
    if (max_retries < 0) throw ValidationError("remote: retry budget must be >= 0");
  }
};

struct EndpointUrl {
  std::string scheme_host_port;
  std::string path;
};

inline EndpointUrl split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ValidationError("remote: endpoint must start with http:// or https://");
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ValidationError("remote: unsupported scheme " + scheme);
  const auto path_start = url.find('/', scheme_end + 3);
  EndpointUrl out;
  out.scheme_host_port = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? std::string() : url.substr(path_start);
  if (out.path.empty() || out.path == "/") out.path = "/v1/chat/completions";
  return out;
}

inline std::string chat_request_body(const PromptBundle& bundle, const std::string& model, double temperature) {
  nlohmann::ordered_json body{{"model", model},
                              {"messages",
                               {{{"role", "system"}, {"content", bundle.system_text}},
                                {{"role", "user"}, {"content", bundle.user_text}}}},
                              {"temperature", temperature}};
  return body.dump();
}

/// Extracts choices[0].message.content; nullopt when the body has another shape.
inline std::optional<std::string> chat_response_text(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
    return std::nullopt;
  }
  const auto& first = j["choices"][0];
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object()) return std::nullopt;
  const auto& content = first["message"].value("content", nlohmann::json());
  if (!content.is_string()) return std::nullopt;
  return content.get<std::string>();
}

/// Chat-completions client. Transport failures, 429 and 5xx responses, and
/// malformed bodies are retried with exponential backoff; other 4xx fail at
/// once.
class RemoteController final : public Controller {
 public:
  explicit RemoteController(RemoteConfig cfg) : cfg_(std::move(cfg)), url_(checked_url(cfg_)) {
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key != nullptr && *key != '\0') api_key_ = key;
  }

  std::string name() const override { return "remote"; }
  const RemoteConfig& config() const noexcept { return cfg_; }

  std::string assess(const AssessRequest& request) override {
    const auto body = chat_request_body(request.bundle, cfg_.model, cfg_.temperature);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(cfg_.backoff_base * (1LL << std::min(attempt - 1, 16)));
      httplib::Client client(url_.scheme_host_port);
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      client.set_write_timeout(secs.count(), usecs.count());
      auto res = client.Post(url_.path, headers, body, "application/json");
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status < 200 || res->status >= 300) {
        throw TransportError(request.scenario_id, "HTTP " + std::to_string(res->status) + " (not retried)");
      }
      if (auto text = chat_response_text(res->body)) return *std::move(text);
      last_error = "response is not a chat completion";
    }
    throw TransportError(request.scenario_id,
                         last_error + " after " + std::to_string(cfg_.max_retries + 1) + " attempt(s)");
  }

  /// At most max_concurrency requests in flight; results land by index.
  std::vector<AssessOutcome> assess_all(std::span<const AssessRequest> requests) override {
    std::vector<AssessOutcome> out(requests.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < requests.size(); i = next++) {
        try {
          out[i].text = assess(requests[i]);
        } catch (const std::exception& e) {
          out[i].error = e.what();
        }
      }
    };
    const std::size_t n_workers = std::min(cfg_.max_concurrency, std::max<std::size_t>(requests.size(), 1));
    {
      std::vector<std::jthread> pool;
      pool.reserve(n_workers);
      for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }
    return out;
  }

 private:
  static EndpointUrl checked_url(const RemoteConfig& cfg) {
    cfg.validate();
    return split_endpoint(cfg.endpoint);
  }

  RemoteConfig cfg_;
  EndpointUrl url_;
  std::string api_key_;
};

}  // namespace trafficllm
