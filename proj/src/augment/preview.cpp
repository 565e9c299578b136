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

#include "mitodg/augment/policy.hpp"
#include "mitodg/core/error.hpp"

namespace mitodg {

namespace {
constexpr int kBorder = 2;
constexpr Rgb kBorderColor = {255, 255, 255};
}  // namespace

Rgb8Image render_preview_grid(const Rgb8Image& image, const std::vector<TransformKind>& kinds,
                              const std::vector<double>& strengths, const RandomStream& rng,
                              const TransformParams& params) {
  if (kinds.empty() || strengths.empty()) {
    throw Error(ErrorCode::kEmptyInput, "preview needs at least one kind and one strength");
  }
  const int w = image.width();
  const int h = image.height();
  const int cols = static_cast<int>(strengths.size());
  const int rows = static_cast<int>(kinds.size());
  Rgb8Image grid(cols * (w + kBorder) + kBorder, rows * (h + kBorder) + kBorder, kBorderColor);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const auto cell = apply_transform(kinds[r], strengths[c], image,
                                        rng.derive(static_cast<std::uint64_t>(r))
                                            .derive(static_cast<std::uint64_t>(c)),
                                        params);
      const int x0 = kBorder + c * (w + kBorder);
      const int y0 = kBorder + r * (h + kBorder);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) grid.set(x0 + x, y0 + y, cell.at(x, y));
    }
  }
  return grid;
}

}  // namespace mitodg
