// Copyright 2026 The mitodg Authors. All Rights Reserved.
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

#include "mitodg/anchors/differential_evolution.hpp"
#include "mitodg/augment/policy.hpp"
#include "mitodg/eval/eval.hpp"
#include "mitodg/sampler/patch.hpp"
#include "mitodg/tiler/mock_detector.hpp"
#include "mitodg/tiler/tiler.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace mitodg {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct RunPaths {
  std::string manifest;
  std::string image_root;  // empty: directory of the manifest
  std::string output_dir = "run";
  friend bool operator==(const RunPaths&, const RunPaths&) = default;
};

struct PipelineOptions {
  int n_folds = 5;
  int fold = 0;
  bool per_scanner_threshold = false;
  MockDetectorConfig mock;
  friend bool operator==(const PipelineOptions&, const PipelineOptions&) = default;
};

struct RunConfig {
  std::optional<std::uint64_t> seed;
  PolicyConfig policy;
  PatchSpec patch;
  TilingConfig tiling;
  MergeConfig merge;
  MatchConfig match;
  AnchorConfig anchors;
  DeParams de;
  PipelineOptions pipeline;
  RunPaths paths;
  int workers = 1;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Every section and key is optional; absent keys keep their defaults.
/// Unknown keys raise kSchemaError (kPolicyParseError inside "policy").
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json to_json(const MatchConfig& config);
nlohmann::json to_json(const DeParams& params);
nlohmann::json to_json(const AnchorConfig& config);

}  // namespace mitodg
