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

#include "mitodg/anchors/anchors.hpp"

#include "mitodg/core/error.hpp"

#include <cmath>

namespace mitodg {

namespace {

std::size_t cells(int extent, double stride) {
  return static_cast<std::size_t>(std::ceil(extent / stride));
}

}  // namespace

void validate(const AnchorConfig& config) {
  if (config.levels.empty() || config.ratios.empty() || config.scales.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "anchor config needs levels, ratios and scales");
  }
  for (std::size_t i = 0; i < config.levels.size(); ++i) {
    const auto& level = config.levels[i];
    if (!(level.stride > 0) || !(level.base_size > 0)) {
      throw Error(ErrorCode::kInvalidArgument, "anchor strides and base sizes must be positive");
    }
    if (i > 0 && !(level.stride > config.levels[i - 1].stride)) {
      throw Error(ErrorCode::kInvalidArgument, "anchor strides must strictly increase");
    }
  }
  for (double r : config.ratios)
    if (!(r > 0)) throw Error(ErrorCode::kInvalidArgument, "anchor ratios must be positive");
  for (double s : config.scales)
    if (!(s > 0)) throw Error(ErrorCode::kInvalidArgument, "anchor scales must be positive");
}

std::size_t anchor_count(const AnchorConfig& config, PixelSize image_size) {
  std::size_t total = 0;
  for (const auto& level : config.levels) {
    total += cells(image_size.width, level.stride) * cells(image_size.height, level.stride);
  }
  return total * config.scales.size() * config.ratios.size();
}

template <typename Scalar>
BoxMatrix<Scalar> generate_anchors(const AnchorConfig& config, PixelSize image_size) {
  validate(config);
  if (image_size.width < 1 || image_size.height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  BoxMatrix<Scalar> anchors(static_cast<Eigen::Index>(anchor_count(config, image_size)), 4);
  Eigen::Index row = 0;
  for (const auto& level : config.levels) {
    const std::size_t nx = cells(image_size.width, level.stride);
    const std::size_t ny = cells(image_size.height, level.stride);
    for (std::size_t j = 0; j < ny; ++j) {
      const double cy = (static_cast<double>(j) + 0.5) * level.stride;
      for (std::size_t i = 0; i < nx; ++i) {
        const double cx = (static_cast<double>(i) + 0.5) * level.stride;
        for (double ratio : config.ratios) {
          for (double scale : config.scales) {
            const double half_w = level.base_size * scale * std::sqrt(ratio) / 2;
            const double half_h = level.base_size * scale / std::sqrt(ratio) / 2;
            anchors.row(row++) << Scalar(cx - half_w), Scalar(cy - half_h), Scalar(cx + half_w),
                Scalar(cy + half_h);
          }
        }
      }
    }
  }
  return anchors;
}

template BoxMatrix<float> generate_anchors<float>(const AnchorConfig&, PixelSize);
template BoxMatrix<double> generate_anchors<double>(const AnchorConfig&, PixelSize);

template <typename Scalar>
AnchorMatcher<Scalar>::AnchorMatcher(std::span<const Box> boxes, AnchorConfig config)
    : config_(std::move(config)) {
  if (boxes.empty()) throw Error(ErrorCode::kEmptyGroundTruth, "no ground-truth boxes");
  validate(config_);
  const auto n = static_cast<Eigen::Index>(boxes.size());
  cx_.resize(n);
  cy_.resize(n);
  w_.resize(n);
  h_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Box& b = boxes[static_cast<std::size_t>(i)];
    if (!b.well_ordered()) throw Error(ErrorCode::kInvalidArgument, "degenerate ground-truth box");
    const Point c = b.center();
    cx_(i) = Scalar(c.x);
    cy_(i) = Scalar(c.y);
    w_(i) = Scalar(b.width());
    h_(i) = Scalar(b.height());
  }
}

template <typename Scalar>
typename AnchorMatcher<Scalar>::Array AnchorMatcher<Scalar>::best_iou(
    std::span<const double> scales) const {
  const Eigen::Index n = cx_.size();
  Array best = Array::Zero(n);
  const Array gt_area = w_ * h_;
  for (const auto& level : config_.levels) {
    const auto stride = Scalar(level.stride);
    // IoU against equal-size boxes falls monotonically with |dx| and |dy|
    // separately, so the nearest cell center on each axis is optimal.
    const Array ax = ((cx_ / stride).floor() + Scalar(0.5)) * stride;
    const Array ay = ((cy_ / stride).floor() + Scalar(0.5)) * stride;
    const Array dx = (cx_ - ax).abs();
    const Array dy = (cy_ - ay).abs();
    for (double ratio : config_.ratios) {
      for (double scale : scales) {
        const auto aw = Scalar(level.base_size * scale * std::sqrt(ratio));
        const auto ah = Scalar(level.base_size * scale / std::sqrt(ratio));
        // Overlap of two centered intervals offset by d.
        const Array ix = ((w_ + aw) / Scalar(2) - dx).min(w_).min(aw).max(Scalar(0));
        const Array iy = ((h_ + ah) / Scalar(2) - dy).min(h_).min(ah).max(Scalar(0));
        const Array inter = ix * iy;
        best = best.max(inter / (gt_area + aw * ah - inter));
      }
    }
  }
  return best;
}

template <typename Scalar>
double AnchorMatcher<Scalar>::fitness(std::span<const double> scales,
                                      FitnessObjective objective) const {
  const Array best = best_iou(scales);
  if (objective == FitnessObjective::kRecallAtIou50) {
    return static_cast<double>((best >= Scalar(0.5)).count()) / static_cast<double>(best.size());
  }
  return static_cast<double>(best.mean());
}

template class AnchorMatcher<float>;
template class AnchorMatcher<double>;

double anchor_fitness(std::span<const double> scales, std::span<const Box> gt_boxes,
                      const AnchorConfig& config, FitnessObjective objective) {
  return AnchorMatcher<double>(gt_boxes, config).fitness(scales, objective);
}

}  // namespace mitodg
