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

#include "mitodg/core/types.hpp"

#include "mitodg/core/error.hpp"

#include <algorithm>

namespace mitodg {

std::string_view to_string(Label label) {
  return label == Label::kMitoticFigure ? "mitotic_figure" : "imposter";
}

std::optional<Label> parse_label(std::string_view name) {
  if (name == "mitotic_figure") return Label::kMitoticFigure;
  if (name == "imposter") return Label::kImposter;
  return std::nullopt;
}

std::optional<Box> intersect(const Box& a, const Box& b) {
  Box r{std::max(a.x_min, b.x_min), std::max(a.y_min, b.y_min), std::min(a.x_max, b.x_max),
        std::min(a.y_max, b.y_max)};
  if (!r.well_ordered()) return std::nullopt;
  return r;
}

double iou(const Box& a, const Box& b) {
  const auto inter = intersect(a, b);
  if (!inter) return 0.0;
  const double i = inter->area();
  return i / (a.area() + b.area() - i);
}

void validate(const Annotation& a) {
  if (!a.box.well_ordered()) {
    throw Error(ErrorCode::kSchemaError,
                "annotation " + std::to_string(a.id) + " has a degenerate box");
  }
  if (!a.box.contains(a.center)) {
    throw Error(ErrorCode::kSchemaError,
                "annotation " + std::to_string(a.id) + " center lies outside its box");
  }
}

}  // namespace mitodg
