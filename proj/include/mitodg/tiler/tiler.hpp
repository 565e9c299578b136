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

#include "mitodg/core/image.hpp"
#include "mitodg/core/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace mitodg {

struct TilingConfig {
  int tile = 448;
  int overlap = 64;
  friend bool operator==(const TilingConfig&, const TilingConfig&) = default;
};

/// Throws kInvalidArgument unless tile >= 1 and 0 <= overlap < tile.
void validate(const TilingConfig& config);

/// Origins along one axis: 0, stride, 2 stride, ... with the last clamped to
/// extent - tile and duplicates removed.
std::vector<int> plan_axis(int extent, const TilingConfig& config);

/// Row-major (y outer) tile origins covering every pixel. Throws
/// kImageSmallerThanTile when either dimension is below the tile size.
std::vector<PixelPoint> plan_tiles(PixelSize image_size, const TilingConfig& config);

struct TileContext {
  std::int64_t image_id = 0;
  PixelPoint origin;
  PixelSize image_size;
};

/// Detector contract: detections for one tile, in tile coordinates. Must be
/// a pure function of its arguments; it may run concurrently on many tiles.
using Detector =
    std::function<std::vector<DetectionRecord>(const Rgb8Image& tile, const TileContext& context)>;

enum class MergeRule {
  kCenterDistance,  // drop a detection whose center is within radius of a kept one
  kIouNms,          // drop a detection overlapping a kept one above iou_threshold
};

struct MergeConfig {
  MergeRule rule = MergeRule::kCenterDistance;
  double radius = 30.0;
  double iou_threshold = 0.5;
  friend bool operator==(const MergeConfig&, const MergeConfig&) = default;
};

/// Total order used for every detection list: confidence descending, then
/// center y, center x, label, box, image id ascending.
bool detection_before(const DetectionRecord& a, const DetectionRecord& b);

/// Greedy same-class suppression in detection_before order. The result is
/// sorted the same way.
std::vector<DetectionRecord> merge_detections(std::vector<DetectionRecord> detections,
                                              const MergeConfig& config);

/// Crops every planned tile, runs the detector, maps detections into the
/// image frame and merges duplicates. Detections whose center falls outside
/// their tile are discarded. Detector exceptions surface as kDetectorFailure
/// naming the tile origin. Output is identical for any worker count.
std::vector<DetectionRecord> run_tiled(const Rgb8Image& image, const Detector& detector,
                                       const TilingConfig& tiling, const MergeConfig& merge,
                                       int workers = 1, std::int64_t image_id = 0);

std::vector<DetectionRecord> run_tiled(const Rgb8Image& image, const Detector& detector,
                                       const TilingConfig& tiling, double dedup_radius,
                                       int workers = 1, std::int64_t image_id = 0);

struct PaddedImage {
  Rgb8Image image;
  PixelSize original;
  bool padded = false;
};

/// Mirror-pads images smaller than the tile so they can be tiled.
PaddedImage pad_for_tiling(const Rgb8Image& image, const TilingConfig& config);

}  // namespace mitodg
