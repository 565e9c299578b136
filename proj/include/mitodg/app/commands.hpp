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

#include "mitodg/app/run_config.hpp"
#include "mitodg/eval/eval.hpp"
#include "mitodg/sampler/folds.hpp"
#include "mitodg/sampler/manifest.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

// Command implementations behind the CLI. Each is a plain function so tests
// can drive the same code paths as the executable.
namespace mitodg::app {

namespace fs = std::filesystem;

fs::path resolve_image_path(const fs::path& manifest_path, const std::string& image_root,
                            const ImageEntry& entry);

struct IngestResult {
  DatasetManifest manifest;
  nlohmann::json report;  // images per scanner, annotations per label, warnings
  std::vector<std::string> warnings;
};

/// Validates the manifest; missing raster files and an empty annotation list
/// are reported as warnings, schema problems throw kSchemaError.
IngestResult ingest(const fs::path& manifest_path, const std::string& image_root = {});

struct PreviewOptions {
  std::vector<TransformKind> kinds{kAllTransformKinds.begin(), kAllTransformKinds.end()};
  std::vector<double> strengths{0.25, 0.5, 1.0};
  TransformParams params;
};

Rgb8Image preview(const fs::path& image_path, const PreviewOptions& options, std::uint64_t seed,
                  const fs::path& out_png);

std::vector<FoldSplit> split_folds(const DatasetManifest& manifest, int n_folds,
                                   std::uint64_t seed, const fs::path& out_json);

enum class SplitSubset { kTrain, kVal, kTest, kTrainVal, kAll };
SplitSubset parse_subset(const std::string& name);
std::vector<std::int64_t> subset_ids(const FoldSplit& fold, SplitSubset subset);

struct SampleOptions {
  int count = 16;
  bool augment = false;
  SplitSubset subset = SplitSubset::kTrain;
  int fold = 0;
  int n_folds = 5;
};

/// Writes patch_NNNNN.png plus samples.jsonl (provenance, patch-frame
/// annotations, and the augmentation log when enabled) into out_dir.
nlohmann::json sample(const fs::path& manifest_path, const RunConfig& config,
                      const SampleOptions& options, std::uint64_t seed, const fs::path& out_dir);

nlohmann::json optimize_anchors(const DatasetManifest& manifest, const RunConfig& config,
                                std::uint64_t seed, FitnessObjective objective,
                                const fs::path& out_json);

enum class DetectorSource { kMock, kTileFile };

struct TileOptions {
  std::int64_t image_id = 0;
  DetectorSource source = DetectorSource::kMock;
  fs::path manifest;           // ground truth for the mock detector
  fs::path tile_detections;    // tile-frame JSON-lines from an external detector
  fs::path emit_tiles_dir;     // optional: write each tile as PNG for external use
};

/// Tiles one raster, runs the selected detector and writes merged
/// image-frame detections as JSON-lines. Returns a summary object.
nlohmann::json tile(const fs::path& image_path, const RunConfig& config,
                    const TileOptions& options, std::uint64_t seed, const fs::path& out_jsonl);

/// Pooled evaluation at a fixed threshold; optional per-image CSV.
EvalReport evaluate(const std::vector<DetectionRecord>& detections,
                    const DatasetManifest& manifest, const MatchConfig& match, double threshold,
                    const fs::path& per_image_csv = {});

/// Optimizes the confidence threshold pooled over all images, or per scanner
/// when per_scanner is set (then the summary lists one report per scanner and
/// the pooled counts at those thresholds).
nlohmann::json optimize_threshold_report(const std::vector<DetectionRecord>& detections,
                                         const DatasetManifest& manifest,
                                         const MatchConfig& match, bool per_scanner);

struct PipelineArtifacts {
  fs::path folds;
  fs::path detections;
  fs::path report;
  fs::path provenance;
  nlohmann::json report_json;
};

/// folds -> mock detector over tiles -> threshold calibrated on the fold's
/// train+val images -> report on its test images. Errors are rethrown with
/// the failing stage name; artifacts of completed stages stay on disk.
PipelineArtifacts run_pipeline(const RunConfig& config, std::uint64_t seed);

}  // namespace mitodg::app
