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

#include "mitodg/app/detections_io.hpp"

#include "mitodg/core/error.hpp"

#include <fstream>

namespace mitodg {

using nlohmann::json;

namespace {

[[noreturn]] void schema_fail(const std::string& what) {
  throw Error(ErrorCode::kSchemaError, what);
}

double number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) schema_fail(std::string("missing field \"") + key + "\"");
  if (!it->is_number()) schema_fail(std::string("field \"") + key + "\" must be a number");
  return it->get<double>();
}

std::int64_t integer(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) schema_fail(std::string("missing field \"") + key + "\"");
  if (!it->is_number_integer()) schema_fail(std::string("field \"") + key + "\" must be an integer");
  return it->get<std::int64_t>();
}

template <typename Parse>
auto read_lines(std::istream& in, const std::string& source, Parse parse) {
  std::vector<decltype(parse(json{}))> out;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(json::parse(line)));
    } catch (const json::exception& e) {
      schema_fail(source + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      schema_fail(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, path.string() + ": cannot open");
  return in;
}

}  // namespace

json to_json(const DetectionRecord& r) {
  return {{"image_id", r.image_id},   {"cx", r.center.x},         {"cy", r.center.y},
          {"x_min", r.box.x_min},     {"y_min", r.box.y_min},     {"x_max", r.box.x_max},
          {"y_max", r.box.y_max},     {"label", std::string(to_string(r.label))},
          {"confidence", r.confidence}};
}

DetectionRecord detection_from_json(const json& j) {
  if (!j.is_object()) schema_fail("detection must be an object");
  DetectionRecord r;
  r.image_id = integer(j, "image_id");
  r.box = {number(j, "x_min"), number(j, "y_min"), number(j, "x_max"), number(j, "y_max")};
  if (!r.box.well_ordered()) schema_fail("detection box is not well ordered");
  r.center = (j.contains("cx") || j.contains("cy")) ? Point{number(j, "cx"), number(j, "cy")}
                                                    : r.box.center();
  r.confidence = number(j, "confidence");
  if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) schema_fail("confidence outside [0, 1]");
  if (const auto it = j.find("label"); it != j.end()) {
    const auto label = it->is_string() ? parse_label(it->get<std::string>()) : std::nullopt;
    if (!label) schema_fail("unknown label " + it->dump());
    r.label = *label;
  }
  return r;
}

std::string to_jsonl(const std::vector<DetectionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<DetectionRecord> read_detections_jsonl(std::istream& in, const std::string& source) {
  return read_lines(in, source, detection_from_json);
}

std::vector<DetectionRecord> read_detections_jsonl(const std::filesystem::path& path) {
  auto in = open(path);
  return read_detections_jsonl(in, path.string());
}

std::vector<TileDetection> read_tile_detections_jsonl(const std::filesystem::path& path) {
  auto in = open(path);
  return read_lines(in, path.string(), [](const json& j) {
    TileDetection t;
    t.record = detection_from_json(j);
    t.tile_x = static_cast<int>(integer(j, "tile_x"));
    t.tile_y = static_cast<int>(integer(j, "tile_y"));
    return t;
  });
}

}  // namespace mitodg
