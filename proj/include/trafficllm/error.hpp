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

#include <stdexcept>
#include <string>

namespace trafficllm {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (bad JSON, wrong shape, out-of-domain token).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Remote controller could not obtain a completion.
class TransportError : public Error {
 public:
  TransportError(std::string scenario_id, const std::string& what)
      : Error(scenario_id.empty() ? what : scenario_id + ": " + what),
        scenario_id_(std::move(scenario_id)) {}

  const std::string& scenario_id() const noexcept { return scenario_id_; }

 private:
  std::string scenario_id_;
};

/// Filesystem failures, always carrying the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace trafficllm
