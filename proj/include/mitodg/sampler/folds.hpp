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

#include "mitodg/core/random.hpp"
#include "mitodg/sampler/manifest.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace mitodg {

/// Image id sets of one fold; each list is sorted ascending.
struct FoldSplit {
  int fold_index = 0;
  std::vector<std::int64_t> train;
  std::vector<std::int64_t> val;
  std::vector<std::int64_t> test;

  friend bool operator==(const FoldSplit&, const FoldSplit&) = default;
};

/// Per scanner, shuffles the image ids with rng.derive(scanner name) and cuts
/// them into n_folds near-equal groups g_0..g_{n-1} (earlier groups take the
/// remainder). Fold k uses test = g_k, val = g_{k+1 mod n}, train = the rest.
/// Throws kTooFewImages when a scanner has fewer than n_folds images and
/// kInvalidArgument when n_folds < 3.
std::vector<FoldSplit> make_folds(const DatasetManifest& manifest, int n_folds,
                                  const RandomStream& rng);

nlohmann::json to_json(const std::vector<FoldSplit>& folds);
std::vector<FoldSplit> folds_from_json(const nlohmann::json& j);

}  // namespace mitodg
