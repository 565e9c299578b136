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

#include "mitodg/anchors/anchors.hpp"
#include "mitodg/core/random.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <functional>
#include <span>
#include <vector>

namespace mitodg {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct DeParams {
  int population = 15;
  Interval mutation{0.5, 1.0};  // F is redrawn from this range every generation
  double crossover = 0.7;
  int max_generations = 200;
  double tolerance = 1e-4;  // stop once max - min population fitness drops below
  std::vector<Interval> bounds = {{0.4, 3.0}, {0.4, 3.0}, {0.4, 3.0}};
  int workers = 1;

  friend bool operator==(const DeParams&, const DeParams&) = default;
};

/// Throws kInvalidBounds for empty, reversed or non-finite bounds and
/// kInvalidArgument for population < 4 or crossover outside [0, 1].
void validate(const DeParams& params);

struct DeResult {
  Eigen::VectorXd best;
  double fitness = 0.0;
  int generations = 0;
  /// Best fitness after initialization, then after each generation.
  std::vector<double> history;
  std::size_t evaluations = 0;
};

/// Objective to maximize. Must be pure: it may be called concurrently.
using DeObjective = std::function<double(const Eigen::VectorXd&)>;
/// Sees every evaluated candidate, on the calling thread, in a fixed order.
using DeObserver = std::function<void(const Eigen::VectorXd&, double)>;

/// DE/rand/1/bin with greedy selection. Per generation and member: pick
/// distinct r1, r2, r3 != i, mutant = x_r1 + F (x_r2 - x_r3), binomial
/// crossover at `crossover` with one forced dimension, clamp to bounds.
/// All random draws of a generation precede its evaluations, so results do
/// not depend on params.workers.
DeResult differential_evolution(const DeObjective& objective, const DeParams& params,
                                const RandomStream& rng, const DeObserver& observer = {});

struct AnchorSearchResult {
  std::vector<double> scales;  // ascending
  double fitness = 0.0;
  int generations = 0;
  std::vector<double> history;
};

/// Searches shared anchor scales (one per entry of params.bounds) maximizing
/// anchor_fitness. Throws kEmptyGroundTruth or kInvalidBounds.
AnchorSearchResult optimize_scales(std::span<const Box> gt_boxes, const AnchorConfig& config,
                                   const DeParams& params, const RandomStream& rng,
                                   FitnessObjective objective = FitnessObjective::kMeanMaxIou);

nlohmann::json to_json(const AnchorSearchResult& result);

}  // namespace mitodg
