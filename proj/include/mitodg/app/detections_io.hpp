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

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace mitodg {

/// One JSON object per line:
/// {"image_id","cx","cy","x_min","y_min","x_max","y_max","label","confidence"}.
nlohmann::json to_json(const DetectionRecord& record);
/// Throws kSchemaError naming the missing or malformed field.
DetectionRecord detection_from_json(const nlohmann::json& j);

std::string to_jsonl(const std::vector<DetectionRecord>& records);
/// Blank lines are skipped; errors carry the 1-based line number.
std::vector<DetectionRecord> read_detections_jsonl(std::istream& in, const std::string& source);
std::vector<DetectionRecord> read_detections_jsonl(const std::filesystem::path& path);

/// Tile-frame detection from an external detector: a regular record plus
/// "tile_x" and "tile_y" naming the tile origin.
struct TileDetection {
  int tile_x = 0;
  int tile_y = 0;
  DetectionRecord record;
};
std::vector<TileDetection> read_tile_detections_jsonl(const std::filesystem::path& path);

}  // namespace mitodg
