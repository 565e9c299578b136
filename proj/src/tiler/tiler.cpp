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

#include "mitodg/tiler/tiler.hpp"

#include "mitodg/core/error.hpp"
#include "mitodg/core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

namespace mitodg {

void validate(const TilingConfig& config) {
  if (config.tile < 1) throw Error(ErrorCode::kInvalidArgument, "tile size must be positive");
  if (config.overlap < 0 || config.overlap >= config.tile) {
    throw Error(ErrorCode::kInvalidArgument, "overlap must satisfy 0 <= overlap < tile");
  }
}

std::vector<int> plan_axis(int extent, const TilingConfig& config) {
  validate(config);
  if (extent < config.tile) {
    throw Error(ErrorCode::kImageSmallerThanTile,
                "extent " + std::to_string(extent) + " is below the tile size " +
                    std::to_string(config.tile));
  }
  const int stride = config.tile - config.overlap;
  std::vector<int> origins;
  for (int o = 0;; o += stride) {
    const int clamped = std::min(o, extent - config.tile);
    if (origins.empty() || origins.back() != clamped) origins.push_back(clamped);
    if (o + config.tile >= extent) break;
  }
  return origins;
}

std::vector<PixelPoint> plan_tiles(PixelSize image_size, const TilingConfig& config) {
  const auto xs = plan_axis(image_size.width, config);
  const auto ys = plan_axis(image_size.height, config);
  std::vector<PixelPoint> origins;
  origins.reserve(xs.size() * ys.size());
  for (int y : ys)
    for (int x : xs) origins.push_back({x, y});
  return origins;
}

bool detection_before(const DetectionRecord& a, const DetectionRecord& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return std::tie(a.center.y, a.center.x, a.label, a.box.x_min, a.box.y_min, a.box.x_max,
                  a.box.y_max, a.image_id) < std::tie(b.center.y, b.center.x, b.label, b.box.x_min,
                                                      b.box.y_min, b.box.x_max, b.box.y_max,
                                                      b.image_id);
}

namespace {

std::vector<DetectionRecord> merge_by_distance(const std::vector<DetectionRecord>& sorted,
                                               double radius) {
  if (!(radius > 0)) throw Error(ErrorCode::kInvalidArgument, "dedup radius must be positive");
  // Kept detections bucketed on a radius-sized grid per (image, label).
  using CellKey = std::tuple<std::int64_t, Label, long, long>;
  std::map<CellKey, std::vector<Point>> grid;
  std::vector<DetectionRecord> kept;
  const double r2 = radius * radius;
  for (const auto& d : sorted) {
    const long cx = static_cast<long>(std::floor(d.center.x / radius));
    const long cy = static_cast<long>(std::floor(d.center.y / radius));
    bool suppressed = false;
    for (long gy = cy - 1; gy <= cy + 1 && !suppressed; ++gy) {
      for (long gx = cx - 1; gx <= cx + 1 && !suppressed; ++gx) {
        const auto it = grid.find({d.image_id, d.label, gx, gy});
        if (it == grid.end()) continue;
        for (const Point& p : it->second) {
          const double dx = p.x - d.center.x;
          const double dy = p.y - d.center.y;
          if (dx * dx + dy * dy <= r2) {
            suppressed = true;
            break;
          }
        }
      }
    }
    if (suppressed) continue;
    grid[{d.image_id, d.label, cx, cy}].push_back(d.center);
    kept.push_back(d);
  }
  return kept;
}

std::vector<DetectionRecord> merge_by_iou(const std::vector<DetectionRecord>& sorted,
                                          double threshold) {
  std::vector<DetectionRecord> kept;
  for (const auto& d : sorted) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const DetectionRecord& k) {
      return k.image_id == d.image_id && k.label == d.label && iou(k.box, d.box) > threshold;
    });
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

}  // namespace

std::vector<DetectionRecord> merge_detections(std::vector<DetectionRecord> detections,
                                              const MergeConfig& config) {
  std::sort(detections.begin(), detections.end(), detection_before);
  return config.rule == MergeRule::kCenterDistance ? merge_by_distance(detections, config.radius)
                                                   : merge_by_iou(detections, config.iou_threshold);
}

std::vector<DetectionRecord> run_tiled(const Rgb8Image& image, const Detector& detector,
                                       const TilingConfig& tiling, const MergeConfig& merge,
                                       int workers, std::int64_t image_id) {
  const PixelSize size{image.width(), image.height()};
  const auto origins = plan_tiles(size, tiling);
  std::vector<std::vector<DetectionRecord>> per_tile(origins.size());

  parallel_for(origins.size(), workers, [&](std::size_t t) {
    const PixelPoint origin = origins[t];
    const Rgb8Image tile = crop(image, origin, {tiling.tile, tiling.tile});
    std::vector<DetectionRecord> found;
    try {
      found = detector(tile, TileContext{image_id, origin, size});
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kDetectorFailure, "tile at (" + std::to_string(origin.x) + "," +
                                                   std::to_string(origin.y) + "): " + e.what());
    }
    auto& out = per_tile[t];
    for (auto d : found) {
      if (d.center.x < 0 || d.center.y < 0 || d.center.x >= tiling.tile ||
          d.center.y >= tiling.tile) {
        continue;
      }
      d.image_id = image_id;
      d.center = {d.center.x + origin.x, d.center.y + origin.y};
      d.box = d.box.translated(origin.x, origin.y);
      out.push_back(d);
    }
  });

  std::vector<DetectionRecord> all;
  for (auto& v : per_tile) all.insert(all.end(), v.begin(), v.end());
  return merge_detections(std::move(all), merge);
}

std::vector<DetectionRecord> run_tiled(const Rgb8Image& image, const Detector& detector,
                                       const TilingConfig& tiling, double dedup_radius,
                                       int workers, std::int64_t image_id) {
  return run_tiled(image, detector, tiling,
                   MergeConfig{MergeRule::kCenterDistance, dedup_radius, 0.5}, workers, image_id);
}

PaddedImage pad_for_tiling(const Rgb8Image& image, const TilingConfig& config) {
  validate(config);
  PaddedImage out{image, {image.width(), image.height()}, false};
  if (image.width() < config.tile || image.height() < config.tile) {
    out.image = reflect_pad(image, {config.tile, config.tile});
    out.padded = true;
  }
  return out;
}

}  // namespace mitodg
