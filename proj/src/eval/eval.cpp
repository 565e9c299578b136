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

#include "mitodg/eval/eval.hpp"

#include "mitodg/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace mitodg {

namespace {

bool keep_label(const MatchConfig& config, Label label) {
  return !config.class_filter || *config.class_filter == label;
}

/// Indices of kept detections in visiting order.
std::vector<std::size_t> visiting_order(std::span<const DetectionRecord> dets,
                                        const MatchConfig& config, double threshold) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (keep_label(config, dets[i].label) && dets[i].confidence >= threshold) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& da = dets[a];
    const auto& db = dets[b];
    if (da.confidence != db.confidence) return da.confidence > db.confidence;
    if (da.center.y != db.center.y) return da.center.y < db.center.y;
    return da.center.x < db.center.x;
  });
  return order;
}

/// Greedy pass over `order`; is_tp[k] tells whether order[k] matched.
struct GreedyPass {
  std::vector<char> is_tp;
  std::vector<MatchPair> pairs;
  std::size_t gt_count = 0;
};

GreedyPass greedy(std::span<const DetectionRecord> dets, std::span<const Annotation> gts,
                  const MatchConfig& config, const std::vector<std::size_t>& order) {
  if (!(config.radius > 0)) throw Error(ErrorCode::kInvalidArgument, "match radius must be positive");
  std::map<std::int64_t, std::vector<std::size_t>> gt_by_image;
  GreedyPass pass;
  for (std::size_t j = 0; j < gts.size(); ++j) {
    if (!keep_label(config, gts[j].label)) continue;
    gt_by_image[gts[j].image_id].push_back(j);
    ++pass.gt_count;
  }
  std::vector<char> used(gts.size(), 0);
  pass.is_tp.assign(order.size(), 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& d = dets[order[k]];
    const auto it = gt_by_image.find(d.image_id);
    if (it == gt_by_image.end()) continue;
    std::size_t best = gts.size();
    double best_dist = 0.0;
    for (std::size_t j : it->second) {
      if (used[j]) continue;
      const double dist = std::hypot(gts[j].center.x - d.center.x, gts[j].center.y - d.center.y);
      if (dist <= config.radius && (best == gts.size() || dist < best_dist)) {
        best = j;
        best_dist = dist;
      }
    }
    if (best != gts.size()) {
      used[best] = 1;
      pass.is_tp[k] = 1;
      pass.pairs.push_back({order[k], best, best_dist});
    }
  }
  return pass;
}

}  // namespace

EvalReport make_report(std::size_t tp, std::size_t fp, std::size_t fn, double threshold) {
  EvalReport r{tp, fp, fn, 0.0, 0.0, 0.0, threshold};
  if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (r.precision + r.recall > 0) r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

MatchResult match_detections(std::span<const DetectionRecord> detections,
                             std::span<const Annotation> ground_truth, const MatchConfig& config) {
  const auto order = visiting_order(detections, config, -std::numeric_limits<double>::infinity());
  auto pass = greedy(detections, ground_truth, config, order);
  MatchResult result;
  result.tp = pass.pairs.size();
  result.fp = order.size() - result.tp;
  result.fn = pass.gt_count - result.tp;
  result.pairs = std::move(pass.pairs);
  return result;
}

EvalReport evaluate_at_threshold(std::span<const DetectionRecord> detections,
                                 std::span<const Annotation> ground_truth,
                                 const MatchConfig& config, double threshold) {
  const auto order = visiting_order(detections, config, threshold);
  const auto pass = greedy(detections, ground_truth, config, order);
  const std::size_t tp = pass.pairs.size();
  return make_report(tp, order.size() - tp, pass.gt_count - tp, threshold);
}

EvalReport optimize_threshold(std::span<const DetectionRecord> detections,
                              std::span<const Annotation> ground_truth, const MatchConfig& config) {
  // Raising the threshold removes a suffix of the visiting order, and greedy
  // decisions depend only on earlier detections, so one pass over the full
  // order yields the counts for every candidate threshold.
  const auto order = visiting_order(detections, config, -std::numeric_limits<double>::infinity());
  const auto pass = greedy(detections, ground_truth, config, order);

  EvalReport best = make_report(0, 0, pass.gt_count, kKeepNoneThreshold);
  std::size_t tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    tp += static_cast<std::size_t>(pass.is_tp[k]);
    const double conf = detections[order[k]].confidence;
    // Only the last detection of a run of equal confidences closes a candidate.
    if (k + 1 < order.size() && detections[order[k + 1]].confidence == conf) continue;
    const auto report = make_report(tp, (k + 1) - tp, pass.gt_count - tp, conf);
    // Candidates arrive with decreasing thresholds, so >= prefers the lowest.
    if (report.f1 >= best.f1) best = report;
  }
  return best;
}

std::map<std::int64_t, EvalReport> per_image_reports(std::span<const DetectionRecord> detections,
                                                     std::span<const Annotation> ground_truth,
                                                     const MatchConfig& config, double threshold) {
  std::map<std::int64_t, std::vector<DetectionRecord>> dets;
  std::map<std::int64_t, std::vector<Annotation>> gts;
  for (const auto& d : detections) dets[d.image_id].push_back(d);
  for (const auto& g : ground_truth) gts[g.image_id].push_back(g);
  std::set<std::int64_t> ids;
  for (const auto& [id, _] : dets) ids.insert(id);
  for (const auto& [id, _] : gts) ids.insert(id);
  std::map<std::int64_t, EvalReport> out;
  for (auto id : ids) out[id] = evaluate_at_threshold(dets[id], gts[id], config, threshold);
  return out;
}

nlohmann::json to_json(const EvalReport& r) {
  return {{"tp", r.tp},
          {"fp", r.fp},
          {"fn", r.fn},
          {"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1},
          {"threshold", r.threshold}};
}

}  // namespace mitodg
