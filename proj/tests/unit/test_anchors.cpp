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
#include "mitodg/anchors/differential_evolution.hpp"
#include "mitodg/core/error.hpp"
#include "oracles/anchor_oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace mitodg;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIoError;
}

/// Square boxes of side `size` centered on stride-8 cell centers.
std::vector<Box> snapped_boxes(int n, double size, std::uint64_t seed) {
  Generator g = RandomStream(seed).generator();
  std::vector<Box> out;
  for (int i = 0; i < n; ++i) {
    const double cx = 4 + 8 * double(g.between(5, 200));
    const double cy = 4 + 8 * double(g.between(5, 200));
    out.push_back({cx - size / 2, cy - size / 2, cx + size / 2, cy + size / 2});
  }
  return out;
}

std::vector<oracle::Square> to_squares(const std::vector<Box>& boxes) {
  std::vector<oracle::Square> out;
  for (const auto& b : boxes) out.push_back({b.x_min, b.y_min, b.x_max, b.y_max});
  return out;
}

}  // namespace

TEST_CASE("anchor layout examples") {
  const AnchorConfig config;
  CHECK(config.scales.size() * config.ratios.size() == 3);

  AnchorConfig one;
  one.levels = {{8, 32}};
  one.scales = {1.0};
  const auto anchors = generate_anchors<double>(one, {448, 448});
  CHECK(anchors.rows() == 56 * 56);
  CHECK(anchors(0, 0) == -12);
  CHECK(anchors(0, 1) == -12);
  CHECK(anchors(0, 2) == 20);
  CHECK(anchors(0, 3) == 20);
  // Second row is the next cell along x.
  CHECK(anchors(1, 0) == -4);
  CHECK(anchors(1, 1) == -12);

  const auto f = generate_anchors<float>(config, {448, 448});
  CHECK(static_cast<std::size_t>(f.rows()) == anchor_count(config, {448, 448}));
}

TEST_CASE("anchor count formula on random sizes") {
  Generator g = RandomStream(3).generator();
  AnchorConfig config;
  config.ratios = {0.5, 1.0, 2.0};
  for (int t = 0; t < 50; ++t) {
    const PixelSize size{static_cast<int>(g.between(1, 700)), static_cast<int>(g.between(1, 700))};
    std::size_t expected = 0;
    for (const auto& l : config.levels) {
      expected += static_cast<std::size_t>(std::ceil(size.width / l.stride) *
                                           std::ceil(size.height / l.stride)) *
                  3 * 3;
    }
    CHECK(anchor_count(config, size) == expected);
    CHECK(static_cast<std::size_t>(generate_anchors<double>(config, size).rows()) == expected);
  }
}

TEST_CASE("anchor config validation") {
  AnchorConfig c;
  c.levels = {{16, 64}, {8, 32}};
  CHECK(code_of([&] { validate(c); }) == ErrorCode::kInvalidArgument);
  c = {};
  c.scales = {1.0, -1.0};
  CHECK(code_of([&] { validate(c); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { anchor_fitness(std::vector<double>{1.0}, {}, AnchorConfig{}); }) ==
        ErrorCode::kEmptyGroundTruth);
}

TEST_CASE("fitness examples") {
  const AnchorConfig config;
  // (-12, -12, 20, 20) is the first level-0 anchor at scale 1.
  const std::vector<Box> exact = {{-12, -12, 20, 20}};
  CHECK(anchor_fitness(std::vector<double>{1.0}, exact, config) == doctest::Approx(1.0));

  const auto snapped = snapped_boxes(100, 50, 1);
  CHECK(anchor_fitness(std::vector<double>{1.5625}, snapped, config) == doctest::Approx(1.0));

  Generator g = RandomStream(2).generator();
  std::vector<Box> loose;
  for (int i = 0; i < 200; ++i) {
    const double cx = g.uniform(100, 1000), cy = g.uniform(100, 1000);
    loose.push_back({cx - 25, cy - 25, cx + 25, cy + 25});
  }
  const AnchorMatcher<double> matcher(loose, config);
  const std::vector<double> s{1.5625};
  CHECK(matcher.best_iou(s).minCoeff() >= 0.72 - 1e-12);

  const std::vector<double> searched(kMitosisSearchedScales.begin(), kMitosisSearchedScales.end());
  CHECK(matcher.fitness(searched) > matcher.fitness(config.scales));
  CHECK(anchor_fitness(searched, snapped, config) > anchor_fitness(config.scales, snapped, config));
}

TEST_CASE("vectorized matcher agrees with anchor enumeration") {
  Generator g = RandomStream(4).generator();
  std::vector<Box> boxes;
  for (int i = 0; i < 300; ++i) {
    const double cx = g.uniform(50, 900), cy = g.uniform(50, 900);
    const double w = g.uniform(10, 160), h = g.uniform(10, 160);
    boxes.push_back({cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2});
  }
  const AnchorMatcher<double> matcher(boxes, AnchorConfig{});
  const AnchorMatcher<float> matcher_f(boxes, AnchorConfig{});
  for (double scale : {0.4, 0.781, 1.0, 1.3, 2.2, 3.0}) {
    const std::vector<double> s{scale};
    const auto got = matcher.best_iou(s);
    const auto got_f = matcher_f.best_iou(s);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      const auto& b = boxes[i];
      const double want = oracle::best_iou({b.x_min, b.y_min, b.x_max, b.y_max}, scale);
      CHECK(got(static_cast<Eigen::Index>(i)) == doctest::Approx(want).epsilon(1e-12));
      CHECK(got_f(static_cast<Eigen::Index>(i)) == doctest::Approx(want).epsilon(1e-4));
    }
  }
}

TEST_CASE("recall objective") {
  const auto snapped = snapped_boxes(50, 50, 5);
  CHECK(anchor_fitness(std::vector<double>{1.5625}, snapped, AnchorConfig{},
                       FitnessObjective::kRecallAtIou50) == 1.0);
  for (double scale : {0.4, 0.6, 2.5}) {
    int hits = 0;
    for (const auto& b : snapped) {
      hits += oracle::best_iou({b.x_min, b.y_min, b.x_max, b.y_max}, scale) >= 0.5;
    }
    CHECK(anchor_fitness(std::vector<double>{scale}, snapped, AnchorConfig{},
                         FitnessObjective::kRecallAtIou50) == doctest::Approx(hits / 50.0));
  }
}

TEST_CASE("DE on the negative sphere") {
  DeParams p;
  p.bounds = {{-5, 5}, {-5, 5}, {-5, 5}};
  p.max_generations = 300;
  p.tolerance = 1e-10;
  const auto r = differential_evolution([](const Eigen::VectorXd& x) { return -x.squaredNorm(); },
                                        p, RandomStream(1));
  CHECK(r.best.norm() < 1e-2);
  CHECK(r.fitness > -1e-4);
}

TEST_CASE("DE history is monotone and candidates respect bounds") {
  DeParams p;
  p.bounds = {{-2, 1}, {0.5, 4}};
  std::size_t seen = 0;
  bool inside = true;
  const auto r = differential_evolution(
      [](const Eigen::VectorXd& x) { return std::sin(3 * x(0)) * std::cos(2 * x(1)) - 0.1 * x(1); },
      p, RandomStream(2), [&](const Eigen::VectorXd& x, double) {
        ++seen;
        inside &= x(0) >= -2 && x(0) <= 1 && x(1) >= 0.5 && x(1) <= 4;
      });
  CHECK(inside);
  CHECK(seen == r.evaluations);
  CHECK(r.history.size() == static_cast<std::size_t>(r.generations) + 1);
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] >= r.history[i - 1]);
  CHECK(r.history.back() == r.fitness);
}

TEST_CASE("DE results do not depend on workers") {
  DeParams p;
  p.bounds = {{0.4, 3}, {0.4, 3}, {0.4, 3}};
  const auto boxes = snapped_boxes(60, 44, 6);
  p.workers = 1;
  const auto a = optimize_scales(boxes, AnchorConfig{}, p, RandomStream(3));
  p.workers = 4;
  const auto b = optimize_scales(boxes, AnchorConfig{}, p, RandomStream(3));
  CHECK(a.scales == b.scales);
  CHECK(a.history == b.history);
  CHECK(std::is_sorted(a.scales.begin(), a.scales.end()));
}

TEST_CASE("DE parameter validation") {
  DeParams p;
  p.bounds = {{1, 1}};
  CHECK(code_of([&] { validate(p); }) == ErrorCode::kInvalidBounds);
  p.bounds = {{2, 1}};
  CHECK(code_of([&] { validate(p); }) == ErrorCode::kInvalidBounds);
  p.bounds = {{0, std::nan("")}};
  CHECK(code_of([&] { validate(p); }) == ErrorCode::kInvalidBounds);
  p = {};
  p.population = 3;
  CHECK(code_of([&] { validate(p); }) == ErrorCode::kInvalidArgument);
  p = {};
  p.crossover = 1.5;
  CHECK(code_of([&] { validate(p); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { optimize_scales({}, AnchorConfig{}, DeParams{}, RandomStream(1)); }) ==
        ErrorCode::kEmptyGroundTruth);
}

TEST_CASE("uniform 50 px boxes recover scale 1.5625") {
  const auto boxes = snapped_boxes(80, 50, 7);
  const auto r = optimize_scales(boxes, AnchorConfig{}, DeParams{}, RandomStream(11));
  CHECK(r.fitness >= 0.99);
  CHECK(std::any_of(r.scales.begin(), r.scales.end(),
                    [](double s) { return std::abs(s - 1.5625) <= 0.02; }));
}

TEST_CASE("DE agrees with a 50-point grid search on three size clusters") {
  Generator g = RandomStream(8).generator();
  for (int instance = 0; instance < 3; ++instance) {
    std::vector<Box> boxes;
    const double sizes[3] = {g.uniform(28, 40), g.uniform(52, 62), g.uniform(76, 90)};
    for (int c = 0; c < 3; ++c) {
      const auto part = snapped_boxes(20, sizes[c], g.next_u64());
      boxes.insert(boxes.end(), part.begin(), part.end());
    }
    const auto grid = oracle::grid_search3(to_squares(boxes), 0.4, 3.0, 50);
    const auto r = optimize_scales(boxes, AnchorConfig{}, DeParams{}, RandomStream(instance));
    CHECK(r.fitness >= grid.fitness - 1e-9);
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(r.scales[static_cast<std::size_t>(k)] - grid.scales[static_cast<std::size_t>(k)]) <=
            grid.cell);
      CHECK(r.scales[static_cast<std::size_t>(k)] == doctest::Approx(sizes[k] / 32).epsilon(0.01));
    }
  }
}
