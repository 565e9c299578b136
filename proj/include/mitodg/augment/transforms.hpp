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

#include "mitodg/augment/transform_kind.hpp"
#include "mitodg/core/image.hpp"
#include "mitodg/core/random.hpp"

#include <string>
#include <vector>

namespace mitodg {

/// Gains mapping a strength s in [0, 1] onto each kind's native parameter.
/// Defaults reproduce the documented strength table (docs/augmentations.md).
struct TransformParams {
  double solarize_threshold_span = 256.0;   // threshold = span * (1 - s)
  double solarize_add_max = 110.0;          // add round(max * s) below 128
  double posterize_max_drop = 6.0;          // bits = 8 - round(drop * s)
  double blur_sigma_max = 2.0;              // sigma = max * s
  double noise_sigma_max = 40.0;            // byte-scale sigma = max * s
  double cutout_fraction = 0.4;             // side = round(f * s * min(w, h))
  int cutout_fill = 128;
  double clahe_clip_base = 1.0;             // clip = base + gain * s
  double clahe_clip_gain = 3.0;
  int clahe_grid = 8;
  double jpeg_quality_drop = 70.0;          // quality = round(100 - drop * s)
  double color_jitter_range = 0.6;          // factors ~ U(1 - r s, 1 + r s)
  double hue_max_degrees = 36.0;            // shift ~ U(-d s, d s)
  double saturation_range = 1.0;            // factor ~ U(1 - r s, 1 + r s)
  double contrast_range = 0.6;              // factor ~ U(1 - r s, 1 + r s)
  double sharpness_gain = 2.0;              // factor = 1 + g s
  double iso_intensity_max = 0.5;
  double iso_hue_sigma_max = 0.04;
  double fancy_pca_sigma_max = 0.3;
  double he_sigma_max = 0.1;                // sigma_alpha = sigma_beta = max * s

  friend bool operator==(const TransformParams&, const TransformParams&) = default;
};

struct NamedDraw {
  std::string name;
  double value = 0.0;
  friend bool operator==(const NamedDraw&, const NamedDraw&) = default;
};

using DrawLog = std::vector<NamedDraw>;

/// Applies one pool transform at `strength`. Strength 0 returns the input
/// unchanged for every kind. Per-image draws and derived native parameters
/// are appended to `log` when given.
Rgb8Image apply_transform(TransformKind kind, double strength, const Rgb8Image& image,
                          const RandomStream& rng, const TransformParams& params = {},
                          DrawLog* log = nullptr);

}  // namespace mitodg
