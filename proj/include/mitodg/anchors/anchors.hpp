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

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace mitodg {

struct PyramidLevel {
  double stride = 8.0;
  double base_size = 32.0;
  friend bool operator==(const PyramidLevel&, const PyramidLevel&) = default;
};

/// Scales found by an anchor search on 50 x 50 px mitotic-figure boxes with
/// the default five-level pyramid.
inline constexpr std::array<double, 3> kMitosisSearchedScales = {0.781, 1.435, 1.578};

struct AnchorConfig {
  std::vector<PyramidLevel> levels = {
      {8, 32}, {16, 64}, {32, 128}, {64, 256}, {128, 512}};
  std::vector<double> ratios = {1.0};
  std::vector<double> scales = {1.0, std::cbrt(2.0), std::cbrt(4.0)};

  friend bool operator==(const AnchorConfig&, const AnchorConfig&) = default;
};

/// Throws kInvalidArgument unless strides strictly increase, base sizes,
/// ratios and scales are positive, and the lists are non-empty.
void validate(const AnchorConfig& config);

template <typename Scalar>
using BoxMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, 4, Eigen::RowMajor>;

/// Number of anchors generate_anchors produces:
/// sum over levels of ceil(w / stride) * ceil(h / stride) * |scales| * |ratios|.
std::size_t anchor_count(const AnchorConfig& config, PixelSize image_size);

/// Rows are (x_min, y_min, x_max, y_max). Order: level, then cell row, then
/// cell column, then ratio, then scale. Cell (i, j) is centered at
/// ((i + 0.5) stride, (j + 0.5) stride); an anchor is base * scale * sqrt(ratio)
/// wide and base * scale / sqrt(ratio) tall.
template <typename Scalar = double>
BoxMatrix<Scalar> generate_anchors(const AnchorConfig& config, PixelSize image_size);

enum class FitnessObjective {
  kMeanMaxIou,     // mean over boxes of the best anchor IoU
  kRecallAtIou50,  // fraction of boxes whose best anchor IoU >= 0.5
};

/// Ground-truth boxes laid out column-wise for vectorized anchor matching.
/// The anchor grid is unbounded, so every box sees its nearest cell center on
/// every level.
template <typename Scalar = double>
class AnchorMatcher {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  /// Throws kEmptyGroundTruth when `boxes` is empty.
  AnchorMatcher(std::span<const Box> boxes, AnchorConfig config);

  /// Best IoU per box over all levels, ratios and the given scales.
  Array best_iou(std::span<const double> scales) const;

  double fitness(std::span<const double> scales,
                 FitnessObjective objective = FitnessObjective::kMeanMaxIou) const;

  std::size_t size() const noexcept { return static_cast<std::size_t>(cx_.size()); }
  const AnchorConfig& config() const noexcept { return config_; }

 private:
  AnchorConfig config_;
  Array cx_, cy_, w_, h_;
};

/// Throws kEmptyGroundTruth for an empty box list.
double anchor_fitness(std::span<const double> scales, std::span<const Box> gt_boxes,
                      const AnchorConfig& config,
                      FitnessObjective objective = FitnessObjective::kMeanMaxIou);

extern template class AnchorMatcher<float>;
extern template class AnchorMatcher<double>;

}  // namespace mitodg
