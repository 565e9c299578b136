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

#include "mitodg/core/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace mitodg {

struct MatchConfig {
  /// Center distance for a hit; 30 px is 7.5 um at 0.25 um/px.
  double radius = 30.0;
  /// Records of other labels are ignored; nullopt keeps every label.
  std::optional<Label> class_filter = Label::kMitoticFigure;

  friend bool operator==(const MatchConfig&, const MatchConfig&) = default;
};

/// Threshold that retains no detection (all confidences are <= 1).
inline constexpr double kKeepNoneThreshold = 1.0 + std::numeric_limits<double>::epsilon();

struct MatchPair {
  std::size_t detection = 0;     // index into the detection input
  std::size_t ground_truth = 0;  // index into the ground-truth input
  double distance = 0.0;
};

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<MatchPair> pairs;
};

struct EvalReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double threshold = 0.0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Precision, recall and F1 from counts; each ratio is 0 when undefined.
EvalReport make_report(std::size_t tp, std::size_t fp, std::size_t fn, double threshold);

/// Greedy one-to-one matching within each image id. Detections are visited
/// by confidence descending (ties by y, then x); each takes the nearest
/// unmatched ground truth within `radius` (ties by input order).
MatchResult match_detections(std::span<const DetectionRecord> detections,
                             std::span<const Annotation> ground_truth, const MatchConfig& config);

/// Matches only detections with confidence >= threshold.
EvalReport evaluate_at_threshold(std::span<const DetectionRecord> detections,
                                 std::span<const Annotation> ground_truth,
                                 const MatchConfig& config, double threshold);

/// Sweeps every distinct detection confidence plus kKeepNoneThreshold and
/// returns the report with the highest F1; ties go to the lowest threshold.
EvalReport optimize_threshold(std::span<const DetectionRecord> detections,
                              std::span<const Annotation> ground_truth, const MatchConfig& config);

/// Report per image id at a fixed threshold; covers every id seen in either
/// input.
std::map<std::int64_t, EvalReport> per_image_reports(std::span<const DetectionRecord> detections,
                                                     std::span<const Annotation> ground_truth,
                                                     const MatchConfig& config, double threshold);

nlohmann::json to_json(const EvalReport& report);

}  // namespace mitodg
