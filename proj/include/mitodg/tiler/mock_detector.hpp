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

#include "mitodg/core/random.hpp"
#include "mitodg/tiler/tiler.hpp"

#include <vector>

namespace mitodg {

struct MockDetectorConfig {
  double dropout = 0.0;              // probability a ground-truth object is missed
  double false_positive_rate = 0.0;  // planted false positives per ground-truth object
  double center_jitter = 0.0;        // std-dev of the reported center offset, px
  double tp_confidence_lo = 1.0;  // defaults make the mock a pure ground-truth echo
  double tp_confidence_hi = 1.0;
  double fp_confidence_lo = 0.05;
  double fp_confidence_hi = 0.8;
  double fp_box_size = 50.0;

  friend bool operator==(const MockDetectorConfig&, const MockDetectorConfig&) = default;
};

/// Stand-in detector that echoes ground truth. The full set of image-frame
/// detections is fixed at construction from `rng`; each tile call returns the
/// planted detections whose center lies inside that tile, so results do not
/// depend on tiling or call order.
class MockDetector {
 public:
  MockDetector(std::int64_t image_id, PixelSize image_size,
               const std::vector<Annotation>& ground_truth, const MockDetectorConfig& config,
               const RandomStream& rng);

  std::vector<DetectionRecord> operator()(const Rgb8Image& tile, const TileContext& context) const;

  const std::vector<DetectionRecord>& planted() const noexcept { return planted_; }

 private:
  std::vector<DetectionRecord> planted_;
};

}  // namespace mitodg
