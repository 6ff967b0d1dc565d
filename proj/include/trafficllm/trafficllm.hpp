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

#include "trafficllm/controller.hpp"
#include "trafficllm/dataset.hpp"
#include "trafficllm/error.hpp"
#include "trafficllm/eval.hpp"
#include "trafficllm/io.hpp"
#include "trafficllm/layout.hpp"
#include "trafficllm/oracle.hpp"
#include "trafficllm/promptkit.hpp"
#include "trafficllm/remote.hpp"
#include "trafficllm/report.hpp"
#include "trafficllm/scenario.hpp"
#include "trafficllm/version.hpp"
