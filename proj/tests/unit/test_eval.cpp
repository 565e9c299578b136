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
#include "mitodg/core/random.hpp"
#include "mitodg/eval/eval.hpp"
#include "oracles/eval_oracle.hpp"

#include <doctest.h>

#include <set>

using namespace mitodg;

namespace {

DetectionRecord det(double x, double y, double conf, std::int64_t image = 1,
                    Label label = Label::kMitoticFigure) {
  return {image, {x, y}, {x - 25, y - 25, x + 25, y + 25}, label, conf};
}

Annotation gt(std::int64_t id, double x, double y, std::int64_t image = 1,
              Label label = Label::kMitoticFigure) {
  return {id, image, {x, y}, {x - 25, y - 25, x + 25, y + 25}, label};
}

struct Instance {
  std::vector<DetectionRecord> dets;
  std::vector<Annotation> gts;
  std::vector<oracle::Det> odets;
  std::vector<oracle::Gt> ogts;
};

/// Random multi-image instance; confidences sit on the grid i / 999 so a
/// 1,000-point sweep visits every distinct value.
Instance random_instance(Generator& g) {
  Instance inst;
  const int images = static_cast<int>(g.between(1, 4));
  std::int64_t id = 1;
  for (int im = 1; im <= images; ++im) {
    const int n_gt = static_cast<int>(g.between(0, 12));
    for (int k = 0; k < n_gt; ++k) {
      const double x = g.uniform(0, 300), y = g.uniform(0, 300);
      inst.gts.push_back(gt(id++, x, y, im));
      inst.ogts.push_back({im, x, y});
    }
    const int n_det = static_cast<int>(g.between(0, 15));
    for (int k = 0; k < n_det; ++k) {
      double x = g.uniform(0, 300), y = g.uniform(0, 300);
      if (n_gt > 0 && g.bernoulli(0.6)) {
        const auto& target = inst.ogts[inst.ogts.size() - 1 - g.below(static_cast<std::uint64_t>(n_gt))];
        x = target.x + g.normal(0, 15);
        y = target.y + g.normal(0, 15);
      }
      const double conf = static_cast<double>(g.between(0, 999)) / 999.0;
      inst.dets.push_back(det(x, y, conf, im));
      inst.odets.push_back({im, x, y, conf});
    }
  }
  return inst;
}

}  // namespace

TEST_CASE("report arithmetic") {
  const auto zero = make_report(0, 0, 0, 0.5);
  CHECK(zero.precision == 0.0);
  CHECK(zero.recall == 0.0);
  CHECK(zero.f1 == 0.0);
  const auto r = make_report(1, 1, 2, 0.5);
  CHECK(r.precision == 0.5);
  CHECK(r.recall == doctest::Approx(1.0 / 3.0));
  CHECK(r.f1 == doctest::Approx(0.4));
}

TEST_CASE("matching examples") {
  const MatchConfig config;
  const std::vector<Annotation> gts = {gt(1, 100, 100), gt(2, 300, 300), gt(3, 500, 100)};

  std::vector<DetectionRecord> perfect;
  for (const auto& a : gts) perfect.push_back(det(a.center.x, a.center.y, 1.0));
  const auto p = evaluate_at_threshold(perfect, gts, config, 0.5);
  CHECK(p.tp == 3);
  CHECK(p.fp == 0);
  CHECK(p.fn == 0);
  CHECK(p.f1 == 1.0);

  const std::vector<DetectionRecord> two = {det(110, 105, 0.9), det(700, 700, 0.8)};
  const auto r = evaluate_at_threshold(two, gts, config, 0.0);
  CHECK(r.tp == 1);
  CHECK(r.fp == 1);
  CHECK(r.fn == 2);
  CHECK(r.precision == 0.5);
  CHECK(r.recall == doctest::Approx(1.0 / 3.0));
  CHECK(r.f1 == doctest::Approx(0.4));

  const std::vector<Annotation> single = {gt(1, 100, 100)};
  const std::vector<DetectionRecord> rivals = {det(105, 100, 0.8), det(110, 100, 0.9)};
  const auto m = match_detections(rivals, single, config);
  REQUIRE(m.pairs.size() == 1);
  CHECK(m.pairs[0].detection == 1);
  CHECK(m.tp == 1);
  CHECK(m.fp == 1);

  // Matching never crosses images.
  const std::vector<DetectionRecord> other_image = {det(100, 100, 0.9, 2)};
  CHECK(evaluate_at_threshold(other_image, single, config, 0.0).tp == 0);
}

TEST_CASE("threshold optimization examples") {
  const MatchConfig config;
  const std::vector<Annotation> gts = {gt(1, 100, 100), gt(2, 400, 400)};
  const auto none = optimize_threshold({}, gts, config);
  CHECK(none.threshold == kKeepNoneThreshold);
  CHECK(none.f1 == 0.0);
  CHECK(none.fn == 2);

  const std::vector<DetectionRecord> dets = {det(100, 100, 0.9), det(800, 800, 0.8),
                                             det(400, 400, 0.7)};
  CHECK(evaluate_at_threshold(dets, gts, config, 0.9).f1 == doctest::Approx(2.0 / 3.0));
  const auto best = optimize_threshold(dets, gts, config);
  CHECK(best.threshold == 0.7);
  CHECK(best.f1 == doctest::Approx(0.8));
  CHECK(best.precision == doctest::Approx(2.0 / 3.0));
  CHECK(best.recall == 1.0);
}

TEST_CASE("optimize_threshold equals a dense sweep and the greedy oracle") {
  Generator g = RandomStream(1).generator();
  const MatchConfig config;
  for (int t = 0; t < 100; ++t) {
    const auto inst = random_instance(g);
    const auto best = optimize_threshold(inst.dets, inst.gts, config);
    CHECK(best.f1 == doctest::Approx(oracle::dense_sweep_f1(inst.odets, inst.ogts, 30.0, 1000)).epsilon(1e-12));
    for (double th : {0.0, 0.25, 0.5, best.threshold}) {
      const auto r = evaluate_at_threshold(inst.dets, inst.gts, config, th);
      const auto o = oracle::greedy(inst.odets, inst.ogts, 30.0, th);
      CHECK(r.tp == o.tp);
      CHECK(r.fp == o.fp);
      CHECK(r.fn == o.fn);
      CHECK(best.f1 >= r.f1);
    }
    const auto at = evaluate_at_threshold(inst.dets, inst.gts, config, best.threshold);
    CHECK(at == best);
  }
}

TEST_CASE("counting invariants and one-to-one matching") {
  Generator g = RandomStream(2).generator();
  MatchConfig config;
  for (int t = 0; t < 100; ++t) {
    auto inst = random_instance(g);
    for (auto& d : inst.dets) d.label = g.bernoulli(0.2) ? Label::kImposter : Label::kMitoticFigure;
    for (auto& a : inst.gts) a.label = g.bernoulli(0.2) ? Label::kImposter : Label::kMitoticFigure;
    const double th = g.uniform();
    const auto kept_dets = std::count_if(inst.dets.begin(), inst.dets.end(), [&](const auto& d) {
      return d.label == Label::kMitoticFigure && d.confidence >= th;
    });
    const auto kept_gts = std::count_if(inst.gts.begin(), inst.gts.end(),
                                        [](const auto& a) { return a.label == Label::kMitoticFigure; });
    const auto r = evaluate_at_threshold(inst.dets, inst.gts, config, th);
    CHECK(r.tp + r.fn == static_cast<std::size_t>(kept_gts));
    CHECK(r.tp + r.fp == static_cast<std::size_t>(kept_dets));

    const auto m = match_detections(inst.dets, inst.gts, config);
    std::set<std::size_t> ds, gs;
    for (const auto& p : m.pairs) {
      CHECK(ds.insert(p.detection).second);
      CHECK(gs.insert(p.ground_truth).second);
      CHECK(p.distance <= config.radius);
      CHECK(inst.dets[p.detection].image_id == inst.gts[p.ground_truth].image_id);
    }

    config.class_filter.reset();
    const auto all = evaluate_at_threshold(inst.dets, inst.gts, config, th);
    CHECK(all.tp + all.fn == inst.gts.size());
    config.class_filter = Label::kMitoticFigure;
  }
}

TEST_CASE("monotone confidence maps keep the chosen detection set") {
  Generator g = RandomStream(3).generator();
  const MatchConfig config;
  for (int t = 0; t < 50; ++t) {
    auto inst = random_instance(g);
    const auto a = optimize_threshold(inst.dets, inst.gts, config);
    for (auto& d : inst.dets) d.confidence = d.confidence * d.confidence;
    const auto b = optimize_threshold(inst.dets, inst.gts, config);
    CHECK(a.tp == b.tp);
    CHECK(a.fp == b.fp);
    CHECK(a.fn == b.fn);
    if (a.threshold <= 1.0) CHECK(b.threshold == doctest::Approx(a.threshold * a.threshold));
  }
}

TEST_CASE("greedy matching versus optimal assignment") {
  Generator g = RandomStream(4).generator();
  const MatchConfig config;
  int diverged = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    std::vector<DetectionRecord> dets;
    std::vector<Annotation> gts;
    std::vector<oracle::Det> od;
    std::vector<oracle::Gt> og;
    const int n = static_cast<int>(g.between(1, 8));
    for (int k = 0; k < n; ++k) {
      const double x = g.uniform(0, 120), y = g.uniform(0, 120);
      gts.push_back(gt(k + 1, x, y));
      og.push_back({1, x, y});
    }
    for (int k = 0; k < static_cast<int>(g.between(1, 8)); ++k) {
      const double x = g.uniform(0, 120), y = g.uniform(0, 120), c = g.uniform();
      dets.push_back(det(x, y, c));
      od.push_back({1, x, y, c});
    }
    const auto greedy = match_detections(dets, gts, config).tp;
    const auto best = oracle::max_matching(od, og, 30.0);
    CHECK(greedy <= best);
    // Greedy is maximal, so it reaches at least half the optimum.
    CHECK(2 * greedy >= best);
    diverged += greedy != best;
  }
  MESSAGE("greedy below optimal on ", diverged, " of ", trials, " dense instances");
}

TEST_CASE("per-image reports add up") {
  Generator g = RandomStream(5).generator();
  const MatchConfig config;
  const auto inst = random_instance(g);
  const auto per = per_image_reports(inst.dets, inst.gts, config, 0.3);
  const auto pooled = evaluate_at_threshold(inst.dets, inst.gts, config, 0.3);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& [id, r] : per) {
    tp += r.tp;
    fp += r.fp;
    fn += r.fn;
  }
  CHECK(tp == pooled.tp);
  CHECK(fp == pooled.fp);
  CHECK(fn == pooled.fn);
  CHECK(to_json(pooled).at("f1") == pooled.f1);

  MatchConfig bad;
  bad.radius = 0;
  CHECK_THROWS_AS(match_detections(inst.dets, inst.gts, bad), Error);
}
