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

#include "mitodg/augment/kernels.hpp"

#include "mitodg/core/error.hpp"
#include "mitodg/core/raster_io.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace mitodg::kernels {

namespace {

using Lut = std::array<std::uint8_t, 256>;

const Eigen::Vector3d kLumaWeights(0.299, 0.587, 0.114);

Eigen::MatrixX3d to_matrix(const Rgb8Image& image) { return image.pixels().cast<double>(); }

Rgb8Image from_matrix(const Eigen::MatrixX3d& values, const Rgb8Image& shape) {
  Rgb8Image out = shape;
  auto dst = out.pixels();
  for (Eigen::Index i = 0; i < dst.rows(); ++i)
    for (int c = 0; c < 3; ++c) dst(i, c) = clamp_byte(values(i, c));
  return out;
}

void clamp_in_place(Eigen::MatrixX3d& values) { values = values.cwiseMax(0.0).cwiseMin(255.0); }

Rgb8Image apply_luts(const Rgb8Image& image, const std::array<Lut, 3>& luts) {
  Rgb8Image out = image;
  auto d = out.data();
  for (std::size_t i = 0; i < d.size(); i += 3)
    for (int c = 0; c < 3; ++c) d[i + c] = luts[c][d[i + c]];
  return out;
}

Lut blend_lut(const Lut& target, double blend) {
  Lut out{};
  for (int v = 0; v < 256; ++v) out[v] = clamp_byte(v + blend * (target[v] - v));
  return out;
}

std::array<std::array<std::size_t, 256>, 3> channel_histograms(const Rgb8Image& image) {
  std::array<std::array<std::size_t, 256>, 3> hist{};
  auto d = image.data();
  for (std::size_t i = 0; i < d.size(); i += 3)
    for (int c = 0; c < 3; ++c) ++hist[c][d[i + c]];
  return hist;
}

int mirror(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

// HSV with h in degrees [0, 360), s in [0, 1], v on the byte scale.
struct Hsv {
  double h, s, v;
};

Hsv rgb_to_hsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  Hsv out{0.0, mx > 0 ? d / mx : 0.0, mx};
  if (d > 0) {
    if (mx == r)
      out.h = 60.0 * std::fmod((g - b) / d, 6.0);
    else if (mx == g)
      out.h = 60.0 * ((b - r) / d + 2.0);
    else
      out.h = 60.0 * ((r - g) / d + 4.0);
    if (out.h < 0) out.h += 360.0;
  }
  return out;
}

std::array<double, 3> hsv_to_rgb(Hsv c) {
  double h = std::fmod(c.h, 360.0);
  if (h < 0) h += 360.0;
  const double chroma = c.v * c.s;
  const double x = chroma * (1.0 - std::abs(std::fmod(h / 60.0, 2.0) - 1.0));
  const double m = c.v - chroma;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h / 60.0)) {
    case 0: r = chroma, g = x; break;
    case 1: r = x, g = chroma; break;
    case 2: g = chroma, b = x; break;
    case 3: g = x, b = chroma; break;
    case 4: r = x, b = chroma; break;
    default: r = chroma, b = x; break;
  }
  return {r + m, g + m, b + m};
}

}  // namespace

Rgb8Image solarize(const Rgb8Image& image, double threshold) {
  Lut lut{};
  for (int v = 0; v < 256; ++v) lut[v] = v >= threshold ? static_cast<std::uint8_t>(255 - v) : v;
  return apply_luts(image, {lut, lut, lut});
}

Rgb8Image solarize_add(const Rgb8Image& image, int amount, int below) {
  Lut lut{};
  for (int v = 0; v < 256; ++v)
    lut[v] = v < below ? static_cast<std::uint8_t>(std::clamp(v + amount, 0, 255)) : v;
  return apply_luts(image, {lut, lut, lut});
}

Rgb8Image posterize(const Rgb8Image& image, int bits) {
  if (bits < 0 || bits > 8) throw Error(ErrorCode::kInvalidArgument, "posterize bits must be 0..8");
  const auto mask = static_cast<std::uint8_t>((0xFF << (8 - bits)) & 0xFF);
  Lut lut{};
  for (int v = 0; v < 256; ++v) lut[v] = static_cast<std::uint8_t>(v & mask);
  return apply_luts(image, {lut, lut, lut});
}

Rgb8Image equalize(const Rgb8Image& image, double blend) {
  const auto hist = channel_histograms(image);
  std::array<Lut, 3> luts{};
  for (int c = 0; c < 3; ++c) {
    Lut eq{};
    for (int v = 0; v < 256; ++v) eq[v] = static_cast<std::uint8_t>(v);
    // Step excludes the last occupied bin so the output spans [0, 255].
    std::size_t last = 0;
    for (int v = 255; v >= 0; --v) {
      if (hist[c][v]) {
        last = hist[c][v];
        break;
      }
    }
    const std::size_t step = (image.pixel_count() - last) / 255;
    if (step > 0) {
      std::size_t acc = step / 2;
      for (int v = 0; v < 256; ++v) {
        eq[v] = static_cast<std::uint8_t>(std::min<std::size_t>(acc / step, 255));
        acc += hist[c][v];
      }
    }
    luts[c] = blend_lut(eq, blend);
  }
  return apply_luts(image, luts);
}

Rgb8Image auto_contrast(const Rgb8Image& image, double blend) {
  const auto hist = channel_histograms(image);
  std::array<Lut, 3> luts{};
  for (int c = 0; c < 3; ++c) {
    int lo = 0;
    while (lo < 255 && hist[c][lo] == 0) ++lo;
    int hi = 255;
    while (hi > 0 && hist[c][hi] == 0) --hi;
    Lut stretched{};
    for (int v = 0; v < 256; ++v) {
      stretched[v] = hi > lo ? clamp_byte((v - lo) * 255.0 / (hi - lo)) : static_cast<std::uint8_t>(v);
    }
    luts[c] = blend_lut(stretched, blend);
  }
  return apply_luts(image, luts);
}

Rgb8Image clahe(const Rgb8Image& image, double clip_limit, int grid) {
  if (grid < 1) throw Error(ErrorCode::kInvalidArgument, "CLAHE grid must be positive");
  const int w = image.width();
  const int h = image.height();
  const int gx = std::min(grid, w);
  const int gy = std::min(grid, h);

  std::vector<double> luma(image.pixel_count());
  std::vector<std::uint8_t> luma8(image.pixel_count());
  {
    const auto px = image.pixels();
    for (Eigen::Index i = 0; i < px.rows(); ++i) {
      luma[i] = kLumaWeights(0) * px(i, 0) + kLumaWeights(1) * px(i, 1) + kLumaWeights(2) * px(i, 2);
      luma8[i] = clamp_byte(luma[i]);
    }
  }

  auto start = [](int t, int n, int g) { return static_cast<int>(static_cast<long>(t) * n / g); };

  std::vector<Lut> luts(static_cast<std::size_t>(gx) * gy);
  for (int ty = 0; ty < gy; ++ty) {
    for (int tx = 0; tx < gx; ++tx) {
      const int x0 = start(tx, w, gx), x1 = start(tx + 1, w, gx);
      const int y0 = start(ty, h, gy), y1 = start(ty + 1, h, gy);
      std::array<long, 256> hist{};
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) ++hist[luma8[static_cast<std::size_t>(y) * w + x]];
      const long n = static_cast<long>(x1 - x0) * (y1 - y0);
      const long clip = std::max(1L, static_cast<long>(clip_limit * n / 256.0));
      long excess = 0;
      for (auto& b : hist) {
        if (b > clip) {
          excess += b - clip;
          b = clip;
        }
      }
      const long batch = excess / 256;
      long residual = excess - batch * 256;
      for (auto& b : hist) b += batch;
      if (residual > 0) {
        const long stride = std::max(256L / residual, 1L);
        for (int i = 0; i < 256 && residual > 0; i += static_cast<int>(stride), --residual) ++hist[i];
      }
      Lut& lut = luts[static_cast<std::size_t>(ty) * gx + tx];
      long cdf = 0;
      for (int v = 0; v < 256; ++v) {
        cdf += hist[v];
        lut[v] = clamp_byte(cdf * 255.0 / n);
      }
    }
  }

  // Bilinear interpolation between the LUTs of the surrounding tile centers.
  struct Axis {
    int t0, t1;
    double weight;
  };
  auto axis_table = [&](int n, int g) {
    std::vector<double> centers(g);
    for (int t = 0; t < g; ++t) centers[t] = (start(t, n, g) + start(t + 1, n, g) - 1) / 2.0;
    std::vector<Axis> table(n);
    for (int i = 0; i < n; ++i) {
      int t0 = 0;
      while (t0 + 1 < g && centers[t0 + 1] <= i) ++t0;
      const int t1 = std::min(t0 + 1, g - 1);
      double wgt = t1 == t0 ? 0.0 : (i - centers[t0]) / (centers[t1] - centers[t0]);
      table[i] = {t0, t1, std::clamp(wgt, 0.0, 1.0)};
    }
    return table;
  };
  const auto xs = axis_table(w, gx);
  const auto ys = axis_table(h, gy);

  Rgb8Image out = image;
  for (int y = 0; y < h; ++y) {
    const Axis& ay = ys[y];
    for (int x = 0; x < w; ++x) {
      const Axis& ax = xs[x];
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const std::uint8_t v = luma8[i];
      auto lut = [&](int ty, int tx) { return double(luts[static_cast<std::size_t>(ty) * gx + tx][v]); };
      const double top = (1 - ax.weight) * lut(ay.t0, ax.t0) + ax.weight * lut(ay.t0, ax.t1);
      const double bottom = (1 - ax.weight) * lut(ay.t1, ax.t0) + ax.weight * lut(ay.t1, ax.t1);
      const double mapped = (1 - ay.weight) * top + ay.weight * bottom;
      const double delta = mapped - luma[i];
      std::uint8_t* p = out.pixel(x, y);
      for (int c = 0; c < 3; ++c) p[c] = clamp_byte(p[c] + delta);
    }
  }
  return out;
}

Rgb8Image gaussian_blur(const Rgb8Image& image, double sigma) {
  if (sigma <= 0) return image;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += kernel[i + radius];
  }
  for (auto& k : kernel) k /= sum;

  const int w = image.width();
  const int h = image.height();
  std::vector<double> tmp(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0, 0, 0};
      for (int k = -radius; k <= radius; ++k) {
        const auto* p = image.pixel(mirror(x + k, w), y);
        for (int c = 0; c < 3; ++c) acc[c] += kernel[k + radius] * p[c];
      }
      for (int c = 0; c < 3; ++c) tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc[c];
    }
  }
  Rgb8Image out = image;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0, 0, 0};
      for (int k = -radius; k <= radius; ++k) {
        const std::size_t row = static_cast<std::size_t>(mirror(y + k, h));
        for (int c = 0; c < 3; ++c) acc[c] += kernel[k + radius] * tmp[(row * w + x) * 3 + c];
      }
      auto* p = out.pixel(x, y);
      for (int c = 0; c < 3; ++c) p[c] = clamp_byte(acc[c]);
    }
  }
  return out;
}

Rgb8Image sharpness(const Rgb8Image& image, double factor) {
  const int w = image.width();
  const int h = image.height();
  Rgb8Image smoothed = image;
  // 3x3 smoothing kernel [1 1 1; 1 5 1; 1 1 1] / 13; border pixels keep
  // their original values.
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        int acc = 4 * image.pixel(x, y)[c];
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) acc += image.pixel(x + dx, y + dy)[c];
        smoothed.pixel(x, y)[c] = clamp_byte(acc / 13.0);
      }
    }
  }
  Rgb8Image out = image;
  auto src = image.data();
  auto deg = smoothed.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = clamp_byte(deg[i] + factor * (src[i] - deg[i]));
  return out;
}

Rgb8Image gaussian_noise(const Rgb8Image& image, double sigma, Generator& gen) {
  Rgb8Image out = image;
  for (auto& v : out.data()) v = clamp_byte(v + sigma * gen.normal());
  return out;
}

Rgb8Image cutout(const Rgb8Image& image, PixelPoint origin, int side, std::uint8_t fill) {
  Rgb8Image out = image;
  const int x1 = std::min(origin.x + side, image.width());
  const int y1 = std::min(origin.y + side, image.height());
  for (int y = std::max(origin.y, 0); y < y1; ++y)
    for (int x = std::max(origin.x, 0); x < x1; ++x) out.set(x, y, {fill, fill, fill});
  return out;
}

Rgb8Image brightness(const Rgb8Image& image, double factor) {
  return from_matrix(to_matrix(image) * factor, image);
}

Rgb8Image contrast(const Rgb8Image& image, double factor) {
  const Eigen::MatrixX3d x = to_matrix(image);
  const double mean = (x * kLumaWeights).mean();
  return from_matrix(((x.array() - mean) * factor + mean).matrix(), image);
}

Rgb8Image channel_contrast(const Rgb8Image& image, double factor) {
  const Eigen::MatrixX3d x = to_matrix(image);
  const Eigen::RowVector3d mean = x.colwise().mean();
  const Eigen::MatrixX3d out = ((x.rowwise() - mean) * factor).rowwise() + mean;
  return from_matrix(out, image);
}

Rgb8Image saturation(const Rgb8Image& image, double factor) {
  const Eigen::MatrixX3d x = to_matrix(image);
  const Eigen::VectorXd gray = x * kLumaWeights;
  const Eigen::MatrixX3d out = ((x.colwise() - gray) * factor).colwise() + gray;
  return from_matrix(out, image);
}

Rgb8Image hue_shift(const Rgb8Image& image, double degrees) {
  Rgb8Image out = image;
  auto d = out.data();
  for (std::size_t i = 0; i < d.size(); i += 3) {
    Hsv c = rgb_to_hsv(d[i], d[i + 1], d[i + 2]);
    c.h += degrees;
    const auto rgb = hsv_to_rgb(c);
    for (int k = 0; k < 3; ++k) d[i + k] = clamp_byte(rgb[k]);
  }
  return out;
}

Rgb8Image color_jitter(const Rgb8Image& image, double brightness_factor, double contrast_factor,
                       double saturation_factor) {
  Eigen::MatrixX3d x = to_matrix(image) * brightness_factor;
  clamp_in_place(x);
  const double mean = (x * kLumaWeights).mean();
  x = ((x.array() - mean) * contrast_factor + mean).matrix();
  clamp_in_place(x);
  const Eigen::VectorXd gray = x * kLumaWeights;
  x = ((x.colwise() - gray) * saturation_factor).colwise() + gray;
  return from_matrix(x, image);
}

Rgb8Image iso_noise(const Rgb8Image& image, double intensity, double hue_sigma, Generator& gen) {
  Rgb8Image out = image;
  auto d = out.data();
  for (std::size_t i = 0; i < d.size(); i += 3) {
    Hsv c = rgb_to_hsv(d[i], d[i + 1], d[i + 2]);
    const double hue_noise = gen.normal();
    const double value_noise = gen.normal();
    c.h += 360.0 * hue_sigma * hue_noise;
    c.v = std::clamp(c.v + 2.0 * intensity * std::sqrt(c.v) * value_noise, 0.0, 255.0);
    const auto rgb = hsv_to_rgb(c);
    for (int k = 0; k < 3; ++k) d[i + k] = clamp_byte(rgb[k]);
  }
  return out;
}

Rgb8Image jpeg_roundtrip(const Rgb8Image& image, int quality) {
  return decode_jpeg(encode_jpeg(image, std::clamp(quality, 1, 100)));
}

Rgb8Image pixelwise_channel_shuffle(const Rgb8Image& image, double probability, Generator& gen) {
  Rgb8Image out = image;
  auto src = image.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); i += 3) {
    if (!gen.bernoulli(probability)) continue;
    const auto& perm = kChannelPermutations[gen.below(6)];
    for (int c = 0; c < 3; ++c) dst[i + c] = src[i + perm[c]];
  }
  return out;
}

}  // namespace mitodg::kernels
