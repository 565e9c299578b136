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

// Anchor fitness by enumerating every anchor in a neighborhood of each box
// center, and an exhaustive grid search over sorted scale triples.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

struct Square {
  double x0, y0, x1, y1;
};

inline double box_iou(const Square& a, const Square& b) {
  const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (w <= 0 || h <= 0) return 0.0;
  const double inter = w * h;
  return inter / ((a.x1 - a.x0) * (a.y1 - a.y0) + (b.x1 - b.x0) * (b.y1 - b.y0) - inter);
}

struct Level {
  double stride, base;
};

inline const std::vector<Level>& default_levels() {
  static const std::vector<Level> levels = {{8, 32}, {16, 64}, {32, 128}, {64, 256}, {128, 512}};
  return levels;
}

/// Best IoU of `gt` against square anchors of one scale on every level.
/// Cells within +-3 of the center cell are enumerated explicitly.
inline double best_iou(const Square& gt, double scale,
                       const std::vector<Level>& levels = default_levels()) {
  const double cx = (gt.x0 + gt.x1) / 2, cy = (gt.y0 + gt.y1) / 2;
  double best = 0.0;
  for (const auto& l : levels) {
    const double half = l.base * scale / 2;
    const long ci = static_cast<long>(std::floor(cx / l.stride));
    const long cj = static_cast<long>(std::floor(cy / l.stride));
    for (long i = ci - 3; i <= ci + 3; ++i) {
      for (long j = cj - 3; j <= cj + 3; ++j) {
        const double ax = (i + 0.5) * l.stride, ay = (j + 0.5) * l.stride;
        best = std::max(best, box_iou(gt, {ax - half, ay - half, ax + half, ay + half}));
      }
    }
  }
  return best;
}

inline double mean_fitness(const std::vector<Square>& boxes, const std::vector<double>& scales) {
  double sum = 0.0;
  for (const auto& b : boxes) {
    double m = 0.0;
    for (double s : scales) m = std::max(m, best_iou(b, s));
    sum += m;
  }
  return sum / static_cast<double>(boxes.size());
}

struct GridResult {
  std::vector<double> scales;  // ascending
  double fitness = -1.0;
  double cell = 0.0;
};

/// Exhaustive search over an n-point grid per scale (sorted triples only,
/// since the fitness is symmetric in the scales).
inline GridResult grid_search3(const std::vector<Square>& boxes, double lo, double hi, int n) {
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = lo + (hi - lo) * i / (n - 1);
  std::vector<std::vector<double>> table(boxes.size(), std::vector<double>(n));
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    for (int i = 0; i < n; ++i) table[b][i] = best_iou(boxes[b], grid[i]);
  }
  GridResult out;
  out.cell = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        double sum = 0.0;
        for (std::size_t b = 0; b < boxes.size(); ++b) {
          sum += std::max({table[b][i], table[b][j], table[b][k]});
        }
        const double f = sum / static_cast<double>(boxes.size());
        if (f > out.fitness) {
          out.fitness = f;
          out.scales = {grid[i], grid[j], grid[k]};
        }
      }
    }
  }
  return out;
}

}  // namespace oracle
