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

#include "mitodg/core/error.hpp"
#include "mitodg/sampler/folds.hpp"
#include "mitodg/sampler/manifest.hpp"
#include "mitodg/sampler/patch.hpp"
#include "support/test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

using namespace mitodg;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIoError;
}

DatasetManifest single_box_manifest(int w, int h, Box box) {
  DatasetManifest m;
  m.images.push_back({1, "a.png", w, h, "s"});
  m.annotations.push_back({1, 1, box.center(), box, Label::kMitoticFigure});
  return m;
}

}  // namespace

TEST_CASE("manifest parsing and validation") {
  const auto j = json::parse(R"({
    "images": [{"id": 1, "file_name": "a.png", "width": 100, "height": 80, "scanner": 2},
               {"id": 2, "file_name": "b.png", "width": 100, "height": 80, "scanner": "B"}],
    "annotations": [{"id": 5, "image_id": 1, "bbox": [10, 10, 30, 30], "category": "imposter"}]
  })");
  const auto m = manifest_from_json(j);
  CHECK(m.images[0].scanner == "2");
  CHECK(m.annotations[0].center == Point{20, 20});
  CHECK(m.annotations[0].label == Label::kImposter);
  CHECK(manifest_from_json(to_json(m)) == m);

  const ManifestIndex index(m);
  CHECK(index.by_scanner().size() == 2);
  CHECK(index.annotations_of(2).empty());
  CHECK(code_of([&] { (void)index.image(9); }) == ErrorCode::kInvalidArgument);

  std::string msg;
  auto bad = j;
  bad["annotations"][0]["image_id"] = 77;
  CHECK(code_of([&] { manifest_from_json(bad); }, &msg) == ErrorCode::kSchemaError);
  CHECK(msg.find("77") != std::string::npos);

  bad = j;
  bad["images"][1]["id"] = 1;
  CHECK(code_of([&] { manifest_from_json(bad); }) == ErrorCode::kSchemaError);
  bad = j;
  bad["annotations"][0]["bbox"] = {30, 10, 10, 30};
  CHECK(code_of([&] { manifest_from_json(bad); }, &msg) == ErrorCode::kSchemaError);
  CHECK(msg.find("bbox") != std::string::npos);
  bad = j;
  bad["annotations"][0]["category"] = "mitosis";
  CHECK(code_of([&] { manifest_from_json(bad); }) == ErrorCode::kSchemaError);
  bad = j;
  bad["images"][0].erase("width");
  CHECK(code_of([&] { manifest_from_json(bad); }, &msg) == ErrorCode::kSchemaError);
  CHECK(msg.find("width") != std::string::npos);

  auto empty = j;
  empty["annotations"] = json::array();
  CHECK(manifest_from_json(empty).annotations.empty());
}

TEST_CASE("folds: 50 images per scanner give 30/10/10 and a test cycle") {
  const auto m = testing::grid_manifest(4, 50, 200, 200, 1, 1);
  const ManifestIndex index(m);
  const auto folds = make_folds(m, 5, RandomStream(7));
  REQUIRE(folds.size() == 5);

  std::map<std::int64_t, int> test_count;
  for (const auto& f : folds) {
    for (const auto& [scanner, ids] : index.by_scanner()) {
      const std::set<std::int64_t> mine(ids.begin(), ids.end());
      const auto count = [&](const std::vector<std::int64_t>& v) {
        return std::count_if(v.begin(), v.end(), [&](auto id) { return mine.count(id) > 0; });
      };
      CHECK(count(f.train) == 30);
      CHECK(count(f.val) == 10);
      CHECK(count(f.test) == 10);
    }
    std::set<std::int64_t> all;
    for (const auto* part : {&f.train, &f.val, &f.test}) {
      CHECK(std::is_sorted(part->begin(), part->end()));
      all.insert(part->begin(), part->end());
    }
    CHECK(all.size() == 200);
    CHECK(f.train.size() + f.val.size() + f.test.size() == 200);
    for (auto id : f.test) ++test_count[id];
  }
  CHECK(test_count.size() == 200);
  for (const auto& [id, n] : test_count) CHECK(n == 1);
  for (std::size_t k = 0; k < 5; ++k) CHECK(folds[k].val == folds[(k + 1) % 5].test);

  CHECK(make_folds(m, 5, RandomStream(7)) == folds);
  CHECK(make_folds(m, 5, RandomStream(8)) != folds);
  CHECK(folds_from_json(to_json(folds)) == folds);
}

TEST_CASE("folds: uneven scanners and errors") {
  auto m = testing::grid_manifest(2, 7, 200, 200, 1, 2);
  const auto folds = make_folds(m, 3, RandomStream(1));
  for (const auto& f : folds) CHECK(f.train.size() + f.val.size() + f.test.size() == 14);
  CHECK(code_of([&] { make_folds(m, 8, RandomStream(1)); }) == ErrorCode::kTooFewImages);
  CHECK(code_of([&] { make_folds(m, 2, RandomStream(1)); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("feasible origin interval") {
  CHECK(feasible_origins(975, 1025, 448, 2000) == OriginRange{577, 975});
  CHECK(feasible_origins(0, 50, 448, 448) == OriginRange{0, 0});
  CHECK(feasible_origins(10, 60, 448, 2000) == OriginRange{0, 10});
  CHECK_FALSE(feasible_origins(0, 500, 448, 2000).has_value());
}

TEST_CASE("exact-fit image forces origin (0, 0)") {
  const auto m = single_box_manifest(448, 448, {200, 200, 250, 250});
  const std::vector<std::int64_t> split{1};
  for (std::uint64_t s = 0; s < 20; ++s) {
    CHECK(plan_patch(m, {}, split, RandomStream(s)).provenance.origin == PixelPoint{0, 0});
  }
}

TEST_CASE("origins are uniform over the feasible interval") {
  const auto m = single_box_manifest(2000, 2000, {975, 975, 1025, 1025});
  const std::vector<std::int64_t> split{1};
  const PatchSampler sampler(m, {}, split);
  std::map<int, int> xs;
  int min_y = 10000, max_y = -1;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const auto o = sampler.plan(RandomStream(3).derive(static_cast<std::uint64_t>(i))).provenance.origin;
    ++xs[o.x];
    min_y = std::min(min_y, o.y);
    max_y = std::max(max_y, o.y);
  }
  CHECK(xs.begin()->first == 577);
  CHECK(xs.rbegin()->first == 975);
  CHECK(xs.size() == 399);
  CHECK(min_y == 577);
  CHECK(max_y == 975);
  // Each of 399 cells expects ~100 hits; 6 sigma is ~60.
  for (const auto& [x, c] : xs) CHECK(std::abs(c - n / 399.0) < 60);
}

TEST_CASE("image draws are uniform across the split") {
  const auto m = testing::grid_manifest(1, 10, 600, 600, 3, 3);
  std::vector<std::int64_t> split;
  for (const auto& img : m.images) split.push_back(img.id);
  const PatchSampler sampler(m, {}, split);
  std::map<std::int64_t, int> counts;
  for (const auto& p : sampler.plan_batch(10000, RandomStream(5), 2)) ++counts[p.provenance.image_id];
  CHECK(counts.size() == 10);
  for (const auto& [id, c] : counts) CHECK(std::abs(c - 1000) <= 190);
}

TEST_CASE("patches keep the selected annotation whole and clip neighbors") {
  const auto m = testing::grid_manifest(1, 4, 900, 700, 30, 4);
  std::vector<std::int64_t> split{1, 2, 3, 4};
  PatchSpec spec;
  const PatchSampler sampler(m, spec, split);
  const ImageLoader loader = [](const ImageEntry& e) {
    return testing::random_image(e.width, e.height, static_cast<std::uint64_t>(e.id));
  };
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto plan = sampler.plan(RandomStream(s));
    const auto& prov = plan.provenance;
    const Annotation* chosen = nullptr;
    for (const auto& a : m.annotations) {
      if (a.id == prov.annotation_id) chosen = &a;
    }
    REQUIRE(chosen != nullptr);
    const Box window{double(prov.origin.x), double(prov.origin.y), double(prov.origin.x + 448),
                     double(prov.origin.y + 448)};
    CHECK(window.contains(chosen->box));
    bool found = false;
    for (const auto& a : plan.annotations) {
      CHECK(Box{0, 0, 448, 448}.contains(a.box));
      CHECK(a.box.contains(a.center));
      found |= a.id == chosen->id;
      const auto& original = *std::find_if(m.annotations.begin(), m.annotations.end(),
                                           [&](const Annotation& o) { return o.id == a.id; });
      CHECK(a.box.area() >= 0.25 * original.box.area() - 1e-9);
    }
    CHECK(found);
    for (auto id : prov.dropped_annotation_ids) {
      CHECK(std::none_of(plan.annotations.begin(), plan.annotations.end(),
                         [&](const Annotation& a) { return a.id == id; }));
    }
  }
  const auto s = sampler.sample(RandomStream(1), loader);
  CHECK(s.patch.width() == 448);
  CHECK(s.patch.height() == 448);
  const auto full = loader(m.images[static_cast<std::size_t>(s.provenance.image_id - 1)]);
  CHECK(s.patch == crop(full, s.provenance.origin, {448, 448}));
  CHECK(sample_patch(m, spec, split, RandomStream(1), loader).provenance == s.provenance);
}

TEST_CASE("stratified draws balance labels") {
  DatasetManifest m;
  m.images.push_back({1, "a.png", 1000, 1000, "s"});
  for (int k = 0; k < 10; ++k) {
    const double c = 60 + 80 * k;
    m.annotations.push_back({k + 1, 1, {c, c}, {c - 25, c - 25, c + 25, c + 25},
                             k == 0 ? Label::kImposter : Label::kMitoticFigure});
  }
  const std::vector<std::int64_t> split{1};
  PatchSpec spec;
  spec.draw = AnnotationDraw::kStratified;
  int imposters = 0;
  const int n = 4000;
  for (const auto& p : PatchSampler(m, spec, split).plan_batch(n, RandomStream(2))) {
    imposters += p.provenance.annotation_id == 1;
  }
  CHECK(std::abs(imposters - n / 2) < 6 * 32);

  spec.draw = AnnotationDraw::kUniform;
  imposters = 0;
  for (const auto& p : PatchSampler(m, spec, split).plan_batch(n, RandomStream(2))) {
    imposters += p.provenance.annotation_id == 1;
  }
  CHECK(std::abs(imposters - n / 10) < 6 * 19);
}

TEST_CASE("sampler errors and unannotated images") {
  auto m = single_box_manifest(1000, 1000, {100, 100, 150, 150});
  m.images.push_back({2, "b.png", 1000, 1000, "s"});
  const std::vector<std::int64_t> both{1, 2};
  int skipped = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto p = plan_patch(m, {}, both, RandomStream(s));
    CHECK(p.provenance.image_id == 1);
    skipped += p.provenance.skipped_draws;
  }
  CHECK(skipped > 0);

  const std::vector<std::int64_t> none;
  CHECK(code_of([&] { PatchSampler(m, {}, none); }) == ErrorCode::kEmptySplit);
  const std::vector<std::int64_t> only_empty{2};
  CHECK(code_of([&] { plan_patch(m, {}, only_empty, RandomStream(1)); }) == ErrorCode::kEmptySplit);
  const std::vector<std::int64_t> unknown{9};
  CHECK(code_of([&] { PatchSampler(m, {}, unknown); }) == ErrorCode::kInvalidArgument);

  const auto huge = single_box_manifest(2000, 2000, {100, 100, 700, 700});
  const std::vector<std::int64_t> one{1};
  CHECK(code_of([&] { plan_patch(huge, {}, one, RandomStream(1)); }) ==
        ErrorCode::kUnsatisfiableCrop);
  PatchSpec centered;
  centered.require_full_annotation = false;
  const auto p = plan_patch(huge, centered, one, RandomStream(1));
  CHECK(p.provenance.origin.x <= 400);
  CHECK(p.provenance.origin.x + 448 > 400);
}

TEST_CASE("batch planning is worker-invariant and deterministic") {
  const auto m = testing::grid_manifest(2, 6, 800, 800, 12, 6);
  std::vector<std::int64_t> split;
  for (const auto& img : m.images) split.push_back(img.id);
  const PatchSampler sampler(m, {}, split);
  const auto a = sampler.plan_batch(300, RandomStream(9), 1);
  const auto b = sampler.plan_batch(300, RandomStream(9), 4);
  CHECK(a == b);
  CHECK(a[17] == sampler.plan(RandomStream(9).derive(17)));
  CHECK(to_json(a[0].provenance).at("image_id") == a[0].provenance.image_id);
}
