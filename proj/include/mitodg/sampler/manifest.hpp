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

#include "mitodg/core/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mitodg {

struct ImageEntry {
  std::int64_t id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;
  std::string scanner;

  friend bool operator==(const ImageEntry&, const ImageEntry&) = default;
};

struct DatasetManifest {
  std::vector<ImageEntry> images;
  std::vector<Annotation> annotations;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Throws kSchemaError on duplicate image ids, non-positive dimensions,
/// malformed annotations or annotations naming an unknown image.
void validate(const DatasetManifest& manifest);

/// Parses the manifest JSON schema documented in docs/formats.md. Errors are
/// kSchemaError with the offending JSON path in the message. The result is
/// validated.
DatasetManifest manifest_from_json(const nlohmann::json& j);
DatasetManifest load_manifest(const std::filesystem::path& path);
nlohmann::json to_json(const DatasetManifest& manifest);

/// Lookup tables over a manifest; holds a reference, so the manifest must
/// outlive the index.
class ManifestIndex {
 public:
  explicit ManifestIndex(const DatasetManifest& manifest);

  const DatasetManifest& manifest() const noexcept { return *manifest_; }
  /// Throws kInvalidArgument for unknown ids.
  const ImageEntry& image(std::int64_t id) const;
  bool contains(std::int64_t id) const { return image_pos_.count(id) != 0; }
  /// Indices into manifest().annotations, in manifest order.
  const std::vector<std::size_t>& annotations_of(std::int64_t image_id) const;
  /// Image ids grouped by scanner; scanners and ids in ascending order.
  const std::map<std::string, std::vector<std::int64_t>>& by_scanner() const noexcept {
    return by_scanner_;
  }

 private:
  const DatasetManifest* manifest_;
  std::map<std::int64_t, std::size_t> image_pos_;
  std::map<std::int64_t, std::vector<std::size_t>> annotations_;
  std::map<std::string, std::vector<std::int64_t>> by_scanner_;
};

}  // namespace mitodg
