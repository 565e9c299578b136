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

#include <array>
#include <optional>
#include <string_view>

namespace mitodg {

enum class TransformKind {
  kColorJitter,
  kHeStain,
  kFancyPca,
  kHue,
  kSaturation,
  kEqualize,
  kRandomContrast,
  kAutoContrast,
  kClahe,
  kSolarize,
  kSolarizeAdd,
  kSharpness,
  kGaussianBlur,
  kPosterize,
  kCutout,
  kIsoNoise,
  kJpegArtifacts,
  kPixelwiseChannelShuffle,
  kGaussianNoise,
};

inline constexpr std::array<TransformKind, 19> kAllTransformKinds = {
    TransformKind::kColorJitter,    TransformKind::kHeStain,
    TransformKind::kFancyPca,       TransformKind::kHue,
    TransformKind::kSaturation,     TransformKind::kEqualize,
    TransformKind::kRandomContrast, TransformKind::kAutoContrast,
    TransformKind::kClahe,          TransformKind::kSolarize,
    TransformKind::kSolarizeAdd,    TransformKind::kSharpness,
    TransformKind::kGaussianBlur,   TransformKind::kPosterize,
    TransformKind::kCutout,         TransformKind::kIsoNoise,
    TransformKind::kJpegArtifacts,  TransformKind::kPixelwiseChannelShuffle,
    TransformKind::kGaussianNoise,
};

/// Stable snake_case identifier used in config files and logs.
std::string_view to_string(TransformKind kind);
std::optional<TransformKind> parse_transform_kind(std::string_view name);

}  // namespace mitodg
