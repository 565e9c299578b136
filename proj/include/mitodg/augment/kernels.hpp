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

#include "mitodg/core/image.hpp"
#include "mitodg/core/random.hpp"

#include <cstdint>

// Parameterized image operations behind the augmentation pool. Each takes
// native parameters; the strength mapping lives in transforms.cpp.
namespace mitodg::kernels {

/// Inverts channel values >= threshold.
Rgb8Image solarize(const Rgb8Image& image, double threshold);
/// Adds `amount` to channel values below `below`, saturating at 255.
Rgb8Image solarize_add(const Rgb8Image& image, int amount, int below = 128);
/// Keeps the `bits` most significant bits of each channel.
Rgb8Image posterize(const Rgb8Image& image, int bits);

/// Per-channel histogram equalization, blended with the input by `blend`.
/// Channels with a degenerate histogram are left untouched.
Rgb8Image equalize(const Rgb8Image& image, double blend = 1.0);
/// Per-channel min/max stretch to [0, 255], blended with the input.
Rgb8Image auto_contrast(const Rgb8Image& image, double blend = 1.0);
/// Contrast-limited adaptive equalization of luma on a grid x grid tiling;
/// the luma change is added to every channel so chroma is preserved.
Rgb8Image clahe(const Rgb8Image& image, double clip_limit, int grid = 8);

/// Separable Gaussian blur, kernel radius ceil(3 sigma), mirrored borders.
Rgb8Image gaussian_blur(const Rgb8Image& image, double sigma);
/// factor 1 is identity; > 1 sharpens against a 3x3 smoothed copy.
Rgb8Image sharpness(const Rgb8Image& image, double factor);

/// Adds sigma * N(0,1) to every channel sample in raster order (pixel-major,
/// channel-minor), one normal draw per sample.
Rgb8Image gaussian_noise(const Rgb8Image& image, double sigma, Generator& gen);
Rgb8Image cutout(const Rgb8Image& image, PixelPoint origin, int side, std::uint8_t fill);

Rgb8Image brightness(const Rgb8Image& image, double factor);
/// Scales deviations from the image's mean luma.
Rgb8Image contrast(const Rgb8Image& image, double factor);
/// Scales deviations from each channel's own mean.
Rgb8Image channel_contrast(const Rgb8Image& image, double factor);
/// Scales each pixel's deviation from its own luma.
Rgb8Image saturation(const Rgb8Image& image, double factor);
Rgb8Image hue_shift(const Rgb8Image& image, double degrees);
/// Brightness, contrast, saturation in that order, rounding once at the end.
Rgb8Image color_jitter(const Rgb8Image& image, double brightness, double contrast,
                       double saturation);

/// Sensor-style noise: hue jitter N(0, hue_sigma) in turns plus value noise
/// with standard deviation 2 * intensity * sqrt(v) on the byte scale.
Rgb8Image iso_noise(const Rgb8Image& image, double intensity, double hue_sigma, Generator& gen);
Rgb8Image jpeg_roundtrip(const Rgb8Image& image, int quality);
/// With probability `probability` per pixel, reorders that pixel's channels by
/// one of the six permutations drawn uniformly.
Rgb8Image pixelwise_channel_shuffle(const Rgb8Image& image, double probability, Generator& gen);

}  // namespace mitodg::kernels
