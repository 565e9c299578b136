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

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace mitodg {

using Rgb = std::array<std::uint8_t, 3>;

/// Pixels as rows of an N x 3 matrix; the layout of Rgb8Image::data().
using PixelMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Owned 8-bit RGB raster, row-major, interleaved (r, g, b) triples.
/// The byte layout matches a C-contiguous (height, width, 3) uint8 array.
class Rgb8Image {
 public:
  Rgb8Image() = default;
  Rgb8Image(int width, int height, Rgb fill = {0, 0, 0});
  Rgb8Image(int width, int height, std::vector<std::uint8_t> data);

  /// Copies a (height, width, 3) byte buffer; throws kInvalidArgument when the
  /// buffer length does not match.
  static Rgb8Image from_buffer(std::span<const std::uint8_t> buffer, int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const noexcept { return pixel_count() == 0; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  std::uint8_t* pixel(int x, int y) noexcept { return data_.data() + offset(x, y); }
  const std::uint8_t* pixel(int x, int y) const noexcept { return data_.data() + offset(x, y); }

  Rgb at(int x, int y) const noexcept {
    const auto* p = pixel(x, y);
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb v) noexcept {
    auto* p = pixel(x, y);
    p[0] = v[0];
    p[1] = v[1];
    p[2] = v[2];
  }

  Eigen::Map<const PixelMatrix> pixels() const {
    return {data_.data(), static_cast<Eigen::Index>(pixel_count()), 3};
  }
  Eigen::Map<PixelMatrix> pixels() {
    return {data_.data(), static_cast<Eigen::Index>(pixel_count()), 3};
  }

  friend bool operator==(const Rgb8Image&, const Rgb8Image&) = default;

 private:
  std::size_t offset(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

struct PixelPoint {
  int x = 0;
  int y = 0;
  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

struct PixelSize {
  int width = 0;
  int height = 0;
  friend bool operator==(const PixelSize&, const PixelSize&) = default;
};

/// Copies the window [origin, origin + size). Throws kOutOfBounds when the
/// window leaves the image.
Rgb8Image crop(const Rgb8Image& image, PixelPoint origin, PixelSize size);

Rgb8Image flip_horizontal(const Rgb8Image& image);
Rgb8Image flip_vertical(const Rgb8Image& image);

using ChannelPermutation = std::array<int, 3>;

/// The six channel orders in lexicographic order; index 0 is identity.
inline constexpr std::array<ChannelPermutation, 6> kChannelPermutations = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

/// Output channel c takes input channel perm[c].
Rgb8Image permute_channels(const Rgb8Image& image, const ChannelPermutation& perm);

/// Grows the image to at least `min_size` by mirror reflection at the right and
/// bottom edges (edge pixel not repeated). Images already large enough are
/// returned unchanged.
Rgb8Image reflect_pad(const Rgb8Image& image, PixelSize min_size);

inline std::uint8_t clamp_byte(double v) noexcept {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(v + 0.5);
}

}  // namespace mitodg
