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

#include "mitodg/augment/transform_kind.hpp"

namespace mitodg {

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::kColorJitter: return "color_jitter";
    case TransformKind::kHeStain: return "he_stain";
    case TransformKind::kFancyPca: return "fancy_pca";
    case TransformKind::kHue: return "hue";
    case TransformKind::kSaturation: return "saturation";
    case TransformKind::kEqualize: return "equalize";
    case TransformKind::kRandomContrast: return "random_contrast";
    case TransformKind::kAutoContrast: return "auto_contrast";
    case TransformKind::kClahe: return "clahe";
    case TransformKind::kSolarize: return "solarize";
    case TransformKind::kSolarizeAdd: return "solarize_add";
    case TransformKind::kSharpness: return "sharpness";
    case TransformKind::kGaussianBlur: return "gaussian_blur";
    case TransformKind::kPosterize: return "posterize";
    case TransformKind::kCutout: return "cutout";
    case TransformKind::kIsoNoise: return "iso_noise";
    case TransformKind::kJpegArtifacts: return "jpeg_artifacts";
    case TransformKind::kPixelwiseChannelShuffle: return "pixelwise_channel_shuffle";
    case TransformKind::kGaussianNoise: return "gaussian_noise";
  }
  return "unknown";
}

std::optional<TransformKind> parse_transform_kind(std::string_view name) {
  for (auto kind : kAllTransformKinds) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

}  // namespace mitodg
