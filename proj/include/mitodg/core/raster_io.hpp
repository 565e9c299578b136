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

#include <cstdint>
#include <filesystem>
#include <vector>

namespace mitodg {

/// Reads PNG, JPEG or strip/tile TIFF (non-pyramidal; first directory only).
/// Inputs are converted to 8-bit RGB: alpha dropped, 16-bit samples shifted
/// right by 8, grayscale replicated.
Rgb8Image read_image(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG. Output bytes depend only on the pixels.
void write_png(const Rgb8Image& image, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_png(const Rgb8Image& image);
Rgb8Image decode_png(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> encode_jpeg(const Rgb8Image& image, int quality);
Rgb8Image decode_jpeg(const std::vector<std::uint8_t>& bytes);

void write_tiff(const Rgb8Image& image, const std::filesystem::path& path);

}  // namespace mitodg
