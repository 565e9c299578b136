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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mitodg {

enum class Label { kMitoticFigure, kImposter };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view name);

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned box in continuous pixel coordinates (pixel i spans [i, i+1)).
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }
  Point center() const noexcept { return {(x_min + x_max) / 2, (y_min + y_max) / 2}; }
  bool well_ordered() const noexcept { return x_min < x_max && y_min < y_max; }
  bool contains(Point p) const noexcept {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  bool contains(const Box& b) const noexcept {
    return b.x_min >= x_min && b.x_max <= x_max && b.y_min >= y_min && b.y_max <= y_max;
  }
  Box translated(double dx, double dy) const noexcept {
    return {x_min + dx, y_min + dy, x_max + dx, y_max + dy};
  }

  friend bool operator==(const Box&, const Box&) = default;
};

/// Intersection of two boxes, or nullopt when they do not overlap with
/// positive area.
std::optional<Box> intersect(const Box& a, const Box& b);
double iou(const Box& a, const Box& b);

struct Annotation {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  Point center;
  Box box;
  Label label = Label::kMitoticFigure;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// Throws kSchemaError unless the box is well ordered and holds the center.
void validate(const Annotation& a);

struct DetectionRecord {
  std::int64_t image_id = 0;
  Point center;
  Box box;
  Label label = Label::kMitoticFigure;
  double confidence = 0.0;

  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

}  // namespace mitodg
