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
#include "mitodg/core/random.hpp"
#include "mitodg/sampler/manifest.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace mitodg {

enum class AnnotationDraw {
  kUniform,     // uniform over all annotations of the drawn image
  kStratified,  // uniform over the labels present, then uniform within label
};

struct PatchSpec {
  int size = 448;
  /// When set, the selected annotation's whole box must fit in the patch;
  /// otherwise only its center must.
  bool require_full_annotation = true;
  AnnotationDraw draw = AnnotationDraw::kUniform;
  /// Neighbors whose clipped area falls below this fraction are dropped.
  double min_visible_fraction = 0.25;

  friend bool operator==(const PatchSpec&, const PatchSpec&) = default;
};

/// Inclusive range of valid integer origins along one axis.
struct OriginRange {
  int lo = 0;
  int hi = 0;
  friend bool operator==(const OriginRange&, const OriginRange&) = default;
};

/// Origins o with o <= lo_edge, o + size >= hi_edge and 0 <= o <= dim - size,
/// or nullopt if none exist.
std::optional<OriginRange> feasible_origins(double lo_edge, double hi_edge, int size, int dim);

struct PatchProvenance {
  std::int64_t image_id = 0;
  std::int64_t annotation_id = 0;
  PixelPoint origin;
  /// Image draws rejected because the image had no annotations.
  int skipped_draws = 0;
  std::vector<std::int64_t> dropped_annotation_ids;

  friend bool operator==(const PatchProvenance&, const PatchProvenance&) = default;
};

/// Everything about a patch except its pixels; annotations are in the patch
/// frame.
struct PatchPlan {
  PatchProvenance provenance;
  std::vector<Annotation> annotations;

  friend bool operator==(const PatchPlan&, const PatchPlan&) = default;
};

struct PatchSample {
  Rgb8Image patch;
  std::vector<Annotation> annotations;
  PatchProvenance provenance;
};

using ImageLoader = std::function<Rgb8Image(const ImageEntry&)>;

/// Annotation-centered patch sampling over a fixed split. The draw order per
/// plan is: image index, (label,) annotation index, origin x, origin y.
class PatchSampler {
 public:
  /// Throws kEmptySplit for an empty split, kInvalidArgument for ids not in
  /// the manifest or a non-positive patch size.
  PatchSampler(const DatasetManifest& manifest, PatchSpec spec,
               std::span<const std::int64_t> split);

  /// Throws kEmptySplit if no image of the split is annotated and
  /// kUnsatisfiableCrop if the drawn annotation cannot fit.
  PatchPlan plan(const RandomStream& rng) const;
  PatchSample sample(const RandomStream& rng, const ImageLoader& loader) const;

  /// Item i is planned from rng.derive(i); results do not depend on workers.
  std::vector<PatchPlan> plan_batch(std::size_t count, const RandomStream& rng,
                                    int workers = 1) const;

  const PatchSpec& spec() const noexcept { return spec_; }

 private:
  ManifestIndex index_;
  PatchSpec spec_;
  std::vector<std::int64_t> split_;
  bool any_annotated_ = false;
};

PatchPlan plan_patch(const DatasetManifest& manifest, const PatchSpec& spec,
                     std::span<const std::int64_t> split, const RandomStream& rng);
PatchSample sample_patch(const DatasetManifest& manifest, const PatchSpec& spec,
                         std::span<const std::int64_t> split, const RandomStream& rng,
                         const ImageLoader& loader);

nlohmann::json to_json(const PatchProvenance& provenance);

}  // namespace mitodg
