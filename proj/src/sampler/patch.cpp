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

#include "mitodg/sampler/patch.hpp"

#include "mitodg/core/error.hpp"
#include "mitodg/core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace mitodg {

std::optional<OriginRange> feasible_origins(double lo_edge, double hi_edge, int size, int dim) {
  if (size > dim) return std::nullopt;
  const int lo = std::max(0, static_cast<int>(std::ceil(hi_edge - size)));
  const int hi = std::min(static_cast<int>(std::floor(lo_edge)), dim - size);
  if (lo > hi) return std::nullopt;
  return OriginRange{lo, hi};
}

PatchSampler::PatchSampler(const DatasetManifest& manifest, PatchSpec spec,
                           std::span<const std::int64_t> split)
    : index_(manifest), spec_(spec), split_(split.begin(), split.end()) {
  if (split_.empty()) throw Error(ErrorCode::kEmptySplit, "patch split is empty");
  if (spec_.size < 1) throw Error(ErrorCode::kInvalidArgument, "patch size must be positive");
  std::sort(split_.begin(), split_.end());
  split_.erase(std::unique(split_.begin(), split_.end()), split_.end());
  for (auto id : split_) {
    if (!index_.contains(id)) {
      throw Error(ErrorCode::kInvalidArgument, "split names unknown image id " + std::to_string(id));
    }
    if (!index_.annotations_of(id).empty()) any_annotated_ = true;
  }
}

PatchPlan PatchSampler::plan(const RandomStream& rng) const {
  if (!any_annotated_) {
    throw Error(ErrorCode::kEmptySplit, "no image in the split carries annotations");
  }
  const auto& annotations = index_.manifest().annotations;
  Generator gen = rng.generator();

  PatchPlan plan;
  std::int64_t image_id = 0;
  for (;;) {
    image_id = split_[gen.below(split_.size())];
    if (!index_.annotations_of(image_id).empty()) break;
    ++plan.provenance.skipped_draws;
  }
  const ImageEntry& image = index_.image(image_id);
  const auto& candidates = index_.annotations_of(image_id);

  std::size_t chosen = 0;
  if (spec_.draw == AnnotationDraw::kStratified) {
    std::set<Label> labels;
    for (auto i : candidates) labels.insert(annotations[i].label);
    auto label_it = labels.begin();
    std::advance(label_it, static_cast<std::ptrdiff_t>(gen.below(labels.size())));
    std::vector<std::size_t> same;
    for (auto i : candidates)
      if (annotations[i].label == *label_it) same.push_back(i);
    chosen = same[gen.below(same.size())];
  } else {
    chosen = candidates[gen.below(candidates.size())];
  }
  const Annotation& target = annotations[chosen];

  std::optional<OriginRange> xs;
  std::optional<OriginRange> ys;
  if (spec_.require_full_annotation) {
    xs = feasible_origins(target.box.x_min, target.box.x_max, spec_.size, image.width);
    ys = feasible_origins(target.box.y_min, target.box.y_max, spec_.size, image.height);
  } else {
    // Keep the center strictly inside [o, o + size).
    xs = feasible_origins(target.center.x, std::floor(target.center.x) + 1, spec_.size, image.width);
    ys = feasible_origins(target.center.y, std::floor(target.center.y) + 1, spec_.size, image.height);
  }
  if (!xs || !ys) {
    throw Error(ErrorCode::kUnsatisfiableCrop,
                "annotation " + std::to_string(target.id) + " cannot fit a " +
                    std::to_string(spec_.size) + " px patch in image " + std::to_string(image_id));
  }
  const PixelPoint origin{static_cast<int>(gen.between(xs->lo, xs->hi)),
                          static_cast<int>(gen.between(ys->lo, ys->hi))};

  plan.provenance.image_id = image_id;
  plan.provenance.annotation_id = target.id;
  plan.provenance.origin = origin;

  const Box window{static_cast<double>(origin.x), static_cast<double>(origin.y),
                   static_cast<double>(origin.x + spec_.size),
                   static_cast<double>(origin.y + spec_.size)};
  for (auto i : candidates) {
    const Annotation& a = annotations[i];
    const auto clipped = intersect(a.box, window);
    if (!clipped) continue;
    if (i != chosen && clipped->area() < spec_.min_visible_fraction * a.box.area()) {
      plan.provenance.dropped_annotation_ids.push_back(a.id);
      continue;
    }
    Annotation local = a;
    local.box = clipped->translated(-origin.x, -origin.y);
    local.center = {std::clamp(a.center.x, clipped->x_min, clipped->x_max) - origin.x,
                    std::clamp(a.center.y, clipped->y_min, clipped->y_max) - origin.y};
    plan.annotations.push_back(local);
  }
  return plan;
}

PatchSample PatchSampler::sample(const RandomStream& rng, const ImageLoader& loader) const {
  PatchPlan plan = this->plan(rng);
  const ImageEntry& entry = index_.image(plan.provenance.image_id);
  const Rgb8Image image = loader(entry);
  if (image.width() != entry.width || image.height() != entry.height) {
    throw Error(ErrorCode::kIoError,
                entry.file_name + ": raster is " + std::to_string(image.width()) + "x" +
                    std::to_string(image.height()) + " but the manifest says " +
                    std::to_string(entry.width) + "x" + std::to_string(entry.height));
  }
  return {crop(image, plan.provenance.origin, {spec_.size, spec_.size}),
          std::move(plan.annotations), std::move(plan.provenance)};
}

std::vector<PatchPlan> PatchSampler::plan_batch(std::size_t count, const RandomStream& rng,
                                                int workers) const {
  std::vector<PatchPlan> plans(count);
  parallel_for(count, workers, [&](std::size_t i) { plans[i] = plan(rng.derive(i)); });
  return plans;
}

PatchPlan plan_patch(const DatasetManifest& manifest, const PatchSpec& spec,
                     std::span<const std::int64_t> split, const RandomStream& rng) {
  return PatchSampler(manifest, spec, split).plan(rng);
}

PatchSample sample_patch(const DatasetManifest& manifest, const PatchSpec& spec,
                         std::span<const std::int64_t> split, const RandomStream& rng,
                         const ImageLoader& loader) {
  return PatchSampler(manifest, spec, split).sample(rng, loader);
}

nlohmann::json to_json(const PatchProvenance& p) {
  return {{"image_id", p.image_id},
          {"annotation_id", p.annotation_id},
          {"origin", {p.origin.x, p.origin.y}},
          {"skipped_draws", p.skipped_draws},
          {"dropped_annotation_ids", p.dropped_annotation_ids}};
}

}  // namespace mitodg
