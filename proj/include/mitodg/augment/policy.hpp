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

#include "mitodg/augment/transforms.hpp"
#include "mitodg/core/image.hpp"
#include "mitodg/core/random.hpp"
#include "mitodg/core/types.hpp"

#include <json.hpp>

#include <array>
#include <vector>

namespace mitodg {

struct PolicyConfig {
  std::vector<TransformKind> pool{kAllTransformKinds.begin(), kAllTransformKinds.end()};
  double max_strength = 1.0;
  double flip_h_prob = 0.5;
  double flip_v_prob = 0.5;
  bool channel_permute = true;
  TransformParams params;

  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

/// Throws kEmptyPool for an empty pool and kInvalidArgument for duplicate
/// kinds, a strength outside (0, 1] or probabilities outside [0, 1].
void validate(const PolicyConfig& policy);

struct AugmentationLog {
  bool flipped_h = false;
  bool flipped_v = false;
  ChannelPermutation channel_perm{0, 1, 2};
  TransformKind chosen = TransformKind::kColorJitter;
  double strength = 0.0;
  DrawLog inner_draws;

  friend bool operator==(const AugmentationLog&, const AugmentationLog&) = default;
};

struct AugmentResult {
  Rgb8Image image;
  std::vector<Annotation> boxes;
  AugmentationLog log;
};

/// Policy-level draws, in order: flip_h, flip_v, channel permutation, kind,
/// strength. All come from rng.derive("policy"). The returned log has no
/// inner draws yet.
AugmentationLog draw_policy(const PolicyConfig& policy, const RandomStream& rng);

/// Applies a fixed set of policy decisions: flips, channel permutation, then
/// the chosen transform using rng.derive("transform"). Inner draws are
/// appended to the returned log.
AugmentResult apply_policy(const Rgb8Image& image, const std::vector<Annotation>& boxes,
                           const AugmentationLog& decisions, const TransformParams& params,
                           const RandomStream& rng);

/// draw_policy followed by apply_policy. Throws kEmptyPool when the pool is
/// empty and kOutOfBounds when a box leaves the image.
AugmentResult augment(const Rgb8Image& image, const std::vector<Annotation>& boxes,
                      const PolicyConfig& policy, const RandomStream& rng);

/// Box reflections used by the flip steps: x' = width - x, y' = height - y.
Annotation flip_annotation_horizontal(const Annotation& a, int width);
Annotation flip_annotation_vertical(const Annotation& a, int height);

/// Config schema: {"pool": [names] | "all", "max_strength", "flip_h_prob",
/// "flip_v_prob", "channel_permute", "params": {...}}; every key optional.
/// Unknown transform names raise kPolicyParseError naming the entry.
PolicyConfig policy_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PolicyConfig& policy);
nlohmann::json to_json(const AugmentationLog& log);

/// Grid of apply_transform results: one row per kind, one column per
/// strength, 2 px white borders around and between cells. Cell (r, c) uses
/// rng.derive(r).derive(c). Throws kEmptyInput if either list is empty.
Rgb8Image render_preview_grid(const Rgb8Image& image, const std::vector<TransformKind>& kinds,
                              const std::vector<double>& strengths, const RandomStream& rng,
                              const TransformParams& params = {});

}  // namespace mitodg
