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
#include "mitodg/tiler/mock_detector.hpp"
#include "mitodg/tiler/tiler.hpp"
#include "support/test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace mitodg;

namespace {

DetectionRecord det(double x, double y, double conf, Label label = Label::kMitoticFigure) {
  return {0, {x, y}, {x - 25, y - 25, x + 25, y + 25}, label, conf};
}

/// Detector that reports, in tile frame, every planted image-frame point
/// inside the tile.
Detector planted_detector(std::vector<DetectionRecord> planted) {
  return [planted](const Rgb8Image& tile, const TileContext& ctx) {
    std::vector<DetectionRecord> out;
    for (const auto& d : planted) {
      const double x = d.center.x - ctx.origin.x, y = d.center.y - ctx.origin.y;
      if (x >= 0 && y >= 0 && x < tile.width() && y < tile.height()) {
        auto local = d;
        local.center = {x, y};
        local.box = d.box.translated(-ctx.origin.x, -ctx.origin.y);
        out.push_back(local);
      }
    }
    return out;
  };
}

}  // namespace

TEST_CASE("tile planning examples") {
  const TilingConfig config;
  CHECK(plan_tiles({448, 448}, config) == std::vector<PixelPoint>{{0, 0}});
  CHECK(plan_axis(800, config) == std::vector<int>{0, 352});
  CHECK(plan_axis(832, config) == std::vector<int>{0, 384});
  CHECK(plan_axis(833, config) == std::vector<int>{0, 384, 385});
  const auto tiles = plan_tiles({800, 500}, config);
  CHECK(tiles.size() == 4);
  CHECK(tiles[1] == PixelPoint{352, 0});

  try {
    (void)plan_tiles({447, 900}, config);
    FAIL("expected ImageSmallerThanTile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kImageSmallerThanTile);
  }
  CHECK_THROWS_AS(validate(TilingConfig{448, 448}), Error);
  CHECK_THROWS_AS(validate(TilingConfig{448, -1}), Error);
}

TEST_CASE("tiles cover every pixel on random sizes") {
  Generator g = RandomStream(1).generator();
  for (int t = 0; t < 50; ++t) {
    const TilingConfig config{static_cast<int>(g.between(16, 96)), 0};
    TilingConfig c = config;
    c.overlap = static_cast<int>(g.between(0, config.tile - 1));
    const PixelSize size{static_cast<int>(g.between(c.tile, 700)),
                         static_cast<int>(g.between(c.tile, 700))};
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(size.width) * size.height, 0);
    for (const auto& o : plan_tiles(size, c)) {
      CHECK(o.x + c.tile <= size.width);
      CHECK(o.y + c.tile <= size.height);
      for (int y = o.y; y < o.y + c.tile; ++y) {
        std::fill_n(hit.begin() + static_cast<std::ptrdiff_t>(y) * size.width + o.x, c.tile, 1);
      }
    }
    CHECK(std::count(hit.begin(), hit.end(), 0) == 0);
    const auto xs = plan_axis(size.width, c);
    CHECK(std::is_sorted(xs.begin(), xs.end()));
    CHECK(std::adjacent_find(xs.begin(), xs.end()) == xs.end());
  }
}

TEST_CASE("merging examples") {
  const Rgb8Image img(900, 900);
  const Detector nothing = [](const Rgb8Image&, const TileContext&) {
    return std::vector<DetectionRecord>{};
  };
  CHECK(run_tiled(img, nothing, TilingConfig{}, 30.0).empty());

  const auto merged = merge_detections({det(502, 501, 0.7), det(500, 500, 0.9)}, MergeConfig{});
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].confidence == 0.9);
  CHECK(merged[0].center == Point{500, 500});

  // The same physical object reported by overlapping tiles.
  const auto out = run_tiled(img, planted_detector({det(420, 420, 0.9)}), TilingConfig{}, 30.0);
  REQUIRE(out.size() == 1);
  CHECK(out[0].center == Point{420, 420});

  const Detector once = [](const Rgb8Image&, const TileContext& ctx) {
    std::vector<DetectionRecord> out;
    if (ctx.origin == PixelPoint{352, 0}) out.push_back(det(10, 10, 0.8));
    return out;
  };
  const auto moved = run_tiled(Rgb8Image(800, 448), once, TilingConfig{}, 30.0, 1, 5);
  REQUIRE(moved.size() == 1);
  CHECK(moved[0].center == Point{362, 10});
  CHECK(moved[0].image_id == 5);
}

TEST_CASE("different classes are never merged") {
  const auto merged = merge_detections(
      {det(100, 100, 0.9), det(101, 100, 0.8, Label::kImposter)}, MergeConfig{});
  CHECK(merged.size() == 2);
}

TEST_CASE("merge output has no same-class pair within the radius and is order independent") {
  Generator g = RandomStream(2).generator();
  for (int t = 0; t < 30; ++t) {
    std::vector<DetectionRecord> dets;
    for (int i = 0; i < 150; ++i) {
      dets.push_back(det(g.uniform(0, 400), g.uniform(0, 400), std::round(g.uniform() * 20) / 20,
                         g.bernoulli(0.3) ? Label::kImposter : Label::kMitoticFigure));
    }
    const MergeConfig config{MergeRule::kCenterDistance, g.uniform(5, 40), 0.5};
    const auto out = merge_detections(dets, config);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) {
        if (out[i].label != out[j].label) continue;
        CHECK(std::hypot(out[i].center.x - out[j].center.x, out[i].center.y - out[j].center.y) >
              config.radius);
      }
    }
    CHECK(std::is_sorted(out.begin(), out.end(), detection_before));
    g.shuffle(std::span<DetectionRecord>(dets));
    CHECK(merge_detections(dets, config) == out);

    // Every suppressed detection has a kept same-class neighbor within the radius.
    for (const auto& d : dets) {
      const bool near = std::any_of(out.begin(), out.end(), [&](const DetectionRecord& k) {
        return k.label == d.label &&
               std::hypot(k.center.x - d.center.x, k.center.y - d.center.y) <= config.radius;
      });
      CHECK(near);
    }
  }
}

TEST_CASE("IoU rule") {
  MergeConfig config{MergeRule::kIouNms, 30.0, 0.5};
  const auto out = merge_detections({det(100, 100, 0.9), det(105, 100, 0.8), det(140, 100, 0.7)},
                                    config);
  // 5 px shift of a 50 px box: IoU 0.82; 40 px: IoU 0.11.
  CHECK(out.size() == 2);
  CHECK(out[1].confidence == 0.7);
}

TEST_CASE("tiled output is worker invariant and within bounds") {
  Generator g = RandomStream(3).generator();
  std::vector<DetectionRecord> planted;
  for (int i = 0; i < 300; ++i) planted.push_back(det(g.uniform(0, 1500), g.uniform(0, 1100), g.uniform()));
  const Rgb8Image img(1500, 1100);
  const auto detector = planted_detector(planted);
  const auto a = run_tiled(img, detector, TilingConfig{}, 30.0, 1, 3);
  const auto b = run_tiled(img, detector, TilingConfig{}, 30.0, 4, 3);
  CHECK(a == b);
  CHECK_FALSE(a.empty());
  for (const auto& d : a) {
    CHECK(d.center.x >= 0);
    CHECK(d.center.x < 1500);
    CHECK(d.center.y >= 0);
    CHECK(d.center.y < 1100);
  }
  CHECK(run_tiled(img, detector, TilingConfig{256, 32}, 30.0, 2, 3) ==
        merge_detections([&] {
          auto all = planted;
          for (auto& d : all) d.image_id = 3;
          return all;
        }(), MergeConfig{}));
}

TEST_CASE("detector failures name the tile") {
  const Detector broken = [](const Rgb8Image&, const TileContext& ctx) -> std::vector<DetectionRecord> {
    if (ctx.origin.x > 0) throw std::runtime_error("gpu fell over");
    return {};
  };
  try {
    (void)run_tiled(Rgb8Image(800, 448), broken, TilingConfig{}, 30.0, 2);
    FAIL("expected DetectorFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDetectorFailure);
    CHECK(std::string(e.what()).find("352") != std::string::npos);
  }
}

TEST_CASE("small images are reflect-padded") {
  const auto img = testing::random_image(300, 500, 4);
  const auto padded = pad_for_tiling(img, TilingConfig{});
  CHECK(padded.padded);
  CHECK(padded.original == PixelSize{300, 500});
  CHECK(padded.image.width() == 448);
  CHECK(padded.image.height() == 500);
  CHECK(crop(padded.image, {0, 0}, {300, 500}) == img);
  CHECK_FALSE(pad_for_tiling(Rgb8Image(448, 448), TilingConfig{}).padded);
}

TEST_CASE("mock detector echoes ground truth and perturbs on request") {
  const auto m = testing::grid_manifest(1, 1, 1200, 900, 40, 5);
  const PixelSize size{1200, 900};
  const Rgb8Image img(1200, 900);
  const MockDetector echo(1, size, m.annotations, MockDetectorConfig{}, RandomStream(1));
  const auto out = run_tiled(img, std::cref(echo), TilingConfig{}, 30.0, 2, 1);
  CHECK(out.size() == m.annotations.size());
  for (const auto& a : m.annotations) {
    CHECK(std::any_of(out.begin(), out.end(), [&](const DetectionRecord& d) {
      return d.center == a.center && d.label == a.label && d.confidence == 1.0;
    }));
  }

  MockDetectorConfig noisy;
  noisy.dropout = 0.5;
  noisy.false_positive_rate = 0.25;
  noisy.tp_confidence_lo = 0.6;
  const MockDetector mock(1, size, m.annotations, noisy, RandomStream(2));
  const auto& planted = mock.planted();
  const auto fps = static_cast<std::size_t>(std::lround(0.25 * m.annotations.size()));
  CHECK(planted.size() >= fps);
  CHECK(planted.size() < m.annotations.size() + fps);
  const MockDetector again(1, size, m.annotations, noisy, RandomStream(2));
  CHECK(again.planted() == planted);
}
