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

#include "mitodg/tiler/mock_detector.hpp"

#include <algorithm>
#include <cmath>

namespace mitodg {

MockDetector::MockDetector(std::int64_t image_id, PixelSize image_size,
                           const std::vector<Annotation>& ground_truth,
                           const MockDetectorConfig& config, const RandomStream& rng) {
  const double max_x = std::nextafter(static_cast<double>(image_size.width), 0.0);
  const double max_y = std::nextafter(static_cast<double>(image_size.height), 0.0);
  for (const auto& a : ground_truth) {
    // One stream per object keeps a detection independent of its neighbors.
    Generator gen = rng.derive("gt").derive(static_cast<std::uint64_t>(a.id)).generator();
    const bool dropped = gen.bernoulli(config.dropout);
    const double confidence = gen.uniform(config.tp_confidence_lo, config.tp_confidence_hi);
    const double jx = config.center_jitter > 0 ? gen.normal(0.0, config.center_jitter) : 0.0;
    const double jy = config.center_jitter > 0 ? gen.normal(0.0, config.center_jitter) : 0.0;
    if (dropped) continue;
    const Point c{std::clamp(a.center.x + jx, 0.0, max_x), std::clamp(a.center.y + jy, 0.0, max_y)};
    const double hw = a.box.width() / 2;
    const double hh = a.box.height() / 2;
    planted_.push_back({image_id, c, {c.x - hw, c.y - hh, c.x + hw, c.y + hh}, a.label,
                        std::clamp(confidence, 0.0, 1.0)});
  }
  const auto fp_count = static_cast<std::size_t>(
      std::lround(config.false_positive_rate * static_cast<double>(ground_truth.size())));
  Generator gen = rng.derive("fp").generator();
  const double half = config.fp_box_size / 2;
  for (std::size_t i = 0; i < fp_count; ++i) {
    const Point c{gen.uniform(0.0, image_size.width), gen.uniform(0.0, image_size.height)};
    const double confidence = gen.uniform(config.fp_confidence_lo, config.fp_confidence_hi);
    planted_.push_back({image_id, c, {c.x - half, c.y - half, c.x + half, c.y + half},
                        Label::kMitoticFigure, std::clamp(confidence, 0.0, 1.0)});
  }
}

std::vector<DetectionRecord> MockDetector::operator()(const Rgb8Image& tile,
                                                      const TileContext& context) const {
  std::vector<DetectionRecord> out;
  const double x0 = context.origin.x;
  const double y0 = context.origin.y;
  for (const auto& d : planted_) {
    if (d.center.x < x0 || d.center.y < y0 || d.center.x >= x0 + tile.width() ||
        d.center.y >= y0 + tile.height()) {
      continue;
    }
    DetectionRecord local = d;
    local.center = {d.center.x - x0, d.center.y - y0};
    local.box = d.box.translated(-x0, -y0);
    out.push_back(local);
  }
  return out;
}

}  // namespace mitodg
