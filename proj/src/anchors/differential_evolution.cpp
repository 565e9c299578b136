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

#include "mitodg/anchors/differential_evolution.hpp"

#include "mitodg/core/error.hpp"
#include "mitodg/core/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace mitodg {

void validate(const DeParams& params) {
  if (params.bounds.empty()) throw Error(ErrorCode::kInvalidBounds, "no search dimensions");
  for (const auto& b : params.bounds) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi)) {
      throw Error(ErrorCode::kInvalidBounds, "each bound needs finite lo < hi");
    }
  }
  if (params.population < 4) throw Error(ErrorCode::kInvalidArgument, "population must be >= 4");
  if (!(params.crossover >= 0.0 && params.crossover <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "crossover must lie in [0, 1]");
  }
  if (!(params.mutation.lo <= params.mutation.hi) || params.mutation.lo < 0) {
    throw Error(ErrorCode::kInvalidArgument, "mutation range must be non-negative and ordered");
  }
  if (params.max_generations < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_generations must be non-negative");
  }
}

DeResult differential_evolution(const DeObjective& objective, const DeParams& params,
                                const RandomStream& rng, const DeObserver& observer) {
  validate(params);
  const auto np = static_cast<Eigen::Index>(params.population);
  const auto dim = static_cast<Eigen::Index>(params.bounds.size());
  Eigen::VectorXd lo(dim), hi(dim);
  for (Eigen::Index d = 0; d < dim; ++d) {
    lo(d) = params.bounds[static_cast<std::size_t>(d)].lo;
    hi(d) = params.bounds[static_cast<std::size_t>(d)].hi;
  }

  Generator gen = rng.generator();
  DeResult result;

  // Members are columns.
  Eigen::MatrixXd population(dim, np);
  for (Eigen::Index i = 0; i < np; ++i)
    for (Eigen::Index d = 0; d < dim; ++d) population(d, i) = gen.uniform(lo(d), hi(d));

  auto evaluate = [&](const Eigen::MatrixXd& members) {
    Eigen::VectorXd scores(members.cols());
    parallel_for(static_cast<std::size_t>(members.cols()), params.workers, [&](std::size_t i) {
      scores(static_cast<Eigen::Index>(i)) = objective(members.col(static_cast<Eigen::Index>(i)));
    });
    if (observer) {
      for (Eigen::Index i = 0; i < members.cols(); ++i) observer(members.col(i), scores(i));
    }
    result.evaluations += static_cast<std::size_t>(members.cols());
    return scores;
  };

  Eigen::VectorXd fitness = evaluate(population);
  Eigen::Index best = 0;
  fitness.maxCoeff(&best);
  result.history.push_back(fitness(best));

  Eigen::MatrixXd trials(dim, np);
  for (int g = 0; g < params.max_generations; ++g) {
    if (fitness.maxCoeff() - fitness.minCoeff() < params.tolerance) break;

    const double f = gen.uniform(params.mutation.lo, params.mutation.hi);
    for (Eigen::Index i = 0; i < np; ++i) {
      Eigen::Index r[3];
      for (int k = 0; k < 3; ++k) {
        Eigen::Index c;
        do {
          c = static_cast<Eigen::Index>(gen.below(static_cast<std::uint64_t>(np)));
        } while (c == i || std::find(r, r + k, c) != r + k);
        r[k] = c;
      }
      const Eigen::VectorXd mutant = population.col(r[0]) + f * (population.col(r[1]) - population.col(r[2]));
      const auto forced = static_cast<Eigen::Index>(gen.below(static_cast<std::uint64_t>(dim)));
      for (Eigen::Index d = 0; d < dim; ++d) {
        const bool take = gen.uniform() < params.crossover || d == forced;
        trials(d, i) = take ? std::clamp(mutant(d), lo(d), hi(d)) : population(d, i);
      }
    }

    const Eigen::VectorXd trial_fitness = evaluate(trials);
    for (Eigen::Index i = 0; i < np; ++i) {
      if (trial_fitness(i) >= fitness(i)) {
        population.col(i) = trials.col(i);
        fitness(i) = trial_fitness(i);
      }
    }
    fitness.maxCoeff(&best);
    result.history.push_back(fitness(best));
    result.generations = g + 1;
  }

  fitness.maxCoeff(&best);
  result.best = population.col(best);
  result.fitness = fitness(best);
  return result;
}

AnchorSearchResult optimize_scales(std::span<const Box> gt_boxes, const AnchorConfig& config,
                                   const DeParams& params, const RandomStream& rng,
                                   FitnessObjective objective) {
  const AnchorMatcher<double> matcher(gt_boxes, config);
  validate(params);
  const auto de = differential_evolution(
      [&](const Eigen::VectorXd& x) {
        return matcher.fitness(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                               objective);
      },
      params, rng);
  AnchorSearchResult out;
  out.scales.assign(de.best.data(), de.best.data() + de.best.size());
  std::sort(out.scales.begin(), out.scales.end());
  out.fitness = de.fitness;
  out.generations = de.generations;
  out.history = de.history;
  return out;
}

nlohmann::json to_json(const AnchorSearchResult& result) {
  return {{"scales", result.scales},
          {"fitness", result.fitness},
          {"generations", result.generations},
          {"history", result.history}};
}

}  // namespace mitodg
