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

#include "mitodg/core/image.hpp"

#include "mitodg/core/error.hpp"

#include <algorithm>
#include <string>

namespace mitodg {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

int reflect_index(int i, int n) {
  // Mirror without repeating the edge: n-1 is followed by n-2.
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  return i < n ? i : period - i;
}

}  // namespace

Rgb8Image::Rgb8Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  check_dims(width, height);
  data_.resize(pixel_count() * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill[0];
    data_[i + 1] = fill[1];
    data_[i + 2] = fill[2];
  }
}

Rgb8Image::Rgb8Image(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != pixel_count() * 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "buffer holds " + std::to_string(data_.size()) + " bytes, expected " +
                    std::to_string(pixel_count() * 3));
  }
}

Rgb8Image Rgb8Image::from_buffer(std::span<const std::uint8_t> buffer, int width, int height) {
  return Rgb8Image(width, height, std::vector<std::uint8_t>(buffer.begin(), buffer.end()));
}

Rgb8Image crop(const Rgb8Image& image, PixelPoint origin, PixelSize size) {
  if (origin.x < 0 || origin.y < 0 || size.width < 1 || size.height < 1 ||
      origin.x + size.width > image.width() || origin.y + size.height > image.height()) {
    throw Error(ErrorCode::kOutOfBounds,
                "crop (" + std::to_string(origin.x) + "," + std::to_string(origin.y) + "," +
                    std::to_string(size.width) + "," + std::to_string(size.height) +
                    ") exceeds " + std::to_string(image.width()) + "x" +
                    std::to_string(image.height()));
  }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(size.width) * size.height * 3);
  const std::size_t row_bytes = static_cast<std::size_t>(size.width) * 3;
  for (int j = 0; j < size.height; ++j) {
    const auto* src = image.pixel(origin.x, origin.y + j);
    std::copy(src, src + row_bytes, out.begin() + static_cast<std::ptrdiff_t>(j * row_bytes));
  }
  return Rgb8Image(size.width, size.height, std::move(out));
}

Rgb8Image flip_horizontal(const Rgb8Image& image) {
  Rgb8Image out = image;
  const int w = image.width();
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < w; ++x) out.set(x, y, image.at(w - 1 - x, y));
  return out;
}

Rgb8Image flip_vertical(const Rgb8Image& image) {
  Rgb8Image out = image;
  const int h = image.height();
  const std::size_t row_bytes = static_cast<std::size_t>(image.width()) * 3;
  for (int y = 0; y < h; ++y) {
    const auto* src = image.pixel(0, h - 1 - y);
    std::copy(src, src + row_bytes, out.pixel(0, y));
  }
  return out;
}

Rgb8Image permute_channels(const Rgb8Image& image, const ChannelPermutation& perm) {
  Rgb8Image out = image;
  auto src = image.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); i += 3) {
    dst[i] = src[i + perm[0]];
    dst[i + 1] = src[i + perm[1]];
    dst[i + 2] = src[i + perm[2]];
  }
  return out;
}

Rgb8Image reflect_pad(const Rgb8Image& image, PixelSize min_size) {
  const int w = std::max(image.width(), min_size.width);
  const int h = std::max(image.height(), min_size.height);
  if (w == image.width() && h == image.height()) return image;
  Rgb8Image out(w, h);
  for (int y = 0; y < h; ++y) {
    const int sy = reflect_index(y, image.height());
    for (int x = 0; x < w; ++x) out.set(x, y, image.at(reflect_index(x, image.width()), sy));
  }
  return out;
}

}  // namespace mitodg
