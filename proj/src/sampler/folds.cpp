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

#include "mitodg/sampler/folds.hpp"

#include "mitodg/core/error.hpp"

#include <algorithm>
#include <string>

namespace mitodg {

using nlohmann::json;

std::vector<FoldSplit> make_folds(const DatasetManifest& manifest, int n_folds,
                                  const RandomStream& rng) {
  if (n_folds < 3) throw Error(ErrorCode::kInvalidArgument, "need at least 3 folds");
  const ManifestIndex index(manifest);

  std::vector<FoldSplit> folds(static_cast<std::size_t>(n_folds));
  for (int k = 0; k < n_folds; ++k) folds[k].fold_index = k;

  for (const auto& [scanner, sorted_ids] : index.by_scanner()) {
    if (static_cast<int>(sorted_ids.size()) < n_folds) {
      throw Error(ErrorCode::kTooFewImages,
                  "scanner '" + scanner + "' has " + std::to_string(sorted_ids.size()) +
                      " images, need at least " + std::to_string(n_folds));
    }
    std::vector<std::int64_t> ids = sorted_ids;
    Generator gen = rng.derive(scanner).generator();
    gen.shuffle(std::span<std::int64_t>(ids));

    std::vector<std::vector<std::int64_t>> groups(static_cast<std::size_t>(n_folds));
    const std::size_t base = ids.size() / n_folds;
    const std::size_t extra = ids.size() % n_folds;
    std::size_t pos = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const std::size_t take = base + (g < extra ? 1 : 0);
      groups[g].assign(ids.begin() + static_cast<std::ptrdiff_t>(pos),
                       ids.begin() + static_cast<std::ptrdiff_t>(pos + take));
      pos += take;
    }
    for (int k = 0; k < n_folds; ++k) {
      auto& fold = folds[k];
      const int val_group = (k + 1) % n_folds;
      for (int g = 0; g < n_folds; ++g) {
        auto& target = g == k ? fold.test : g == val_group ? fold.val : fold.train;
        target.insert(target.end(), groups[g].begin(), groups[g].end());
      }
    }
  }
  for (auto& fold : folds) {
    std::sort(fold.train.begin(), fold.train.end());
    std::sort(fold.val.begin(), fold.val.end());
    std::sort(fold.test.begin(), fold.test.end());
  }
  return folds;
}

json to_json(const std::vector<FoldSplit>& folds) {
  json out = json::array();
  for (const auto& f : folds) {
    out.push_back({{"fold", f.fold_index}, {"train", f.train}, {"val", f.val}, {"test", f.test}});
  }
  return {{"folds", out}};
}

std::vector<FoldSplit> folds_from_json(const json& j) {
  std::vector<FoldSplit> folds;
  try {
    for (const auto& f : j.at("folds")) {
      folds.push_back({f.at("fold").get<int>(), f.at("train").get<std::vector<std::int64_t>>(),
                       f.at("val").get<std::vector<std::int64_t>>(),
                       f.at("test").get<std::vector<std::int64_t>>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("folds file: ") + e.what());
  }
  return folds;
}

}  // namespace mitodg
