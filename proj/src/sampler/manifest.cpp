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

#include "mitodg/sampler/manifest.hpp"

#include "mitodg/core/error.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <string>

namespace mitodg {

using nlohmann::json;

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSchemaError, path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema_fail(path, std::string("missing field '") + key + "'");
  return *it;
}

std::int64_t int_field(const json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number_integer()) schema_fail(path + "/" + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string string_field(const json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) schema_fail(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

}  // namespace

void validate(const DatasetManifest& manifest) {
  std::set<std::int64_t> ids;
  for (const auto& img : manifest.images) {
    if (!ids.insert(img.id).second) {
      schema_fail("/images", "duplicate image id " + std::to_string(img.id));
    }
    if (img.width < 1 || img.height < 1) {
      schema_fail("/images", "image " + std::to_string(img.id) + " has non-positive size");
    }
  }
  for (const auto& a : manifest.annotations) {
    if (!ids.count(a.image_id)) {
      schema_fail("/annotations", "annotation " + std::to_string(a.id) +
                                      " references unknown image_id " +
                                      std::to_string(a.image_id));
    }
    validate(a);
  }
}

DatasetManifest manifest_from_json(const json& j) {
  if (!j.is_object()) schema_fail("", "manifest must be a JSON object");
  DatasetManifest m;

  const auto& images = require(j, "images", "");
  if (!images.is_array()) schema_fail("/images", "expected an array");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string path = "/images/" + std::to_string(i);
    const auto& e = images[i];
    if (!e.is_object()) schema_fail(path, "expected an object");
    ImageEntry img;
    img.id = int_field(e, "id", path);
    img.file_name = string_field(e, "file_name", path);
    img.width = static_cast<int>(int_field(e, "width", path));
    img.height = static_cast<int>(int_field(e, "height", path));
    const auto& scanner = require(e, "scanner", path);
    if (scanner.is_string())
      img.scanner = scanner.get<std::string>();
    else if (scanner.is_number_integer())
      img.scanner = std::to_string(scanner.get<std::int64_t>());
    else
      schema_fail(path + "/scanner", "expected a string or integer");
    m.images.push_back(std::move(img));
  }

  const auto it = j.find("annotations");
  if (it != j.end()) {
    if (!it->is_array()) schema_fail("/annotations", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "/annotations/" + std::to_string(i);
      const auto& e = (*it)[i];
      if (!e.is_object()) schema_fail(path, "expected an object");
      Annotation a;
      a.id = int_field(e, "id", path);
      a.image_id = int_field(e, "image_id", path);
      const auto& bbox = require(e, "bbox", path);
      if (!bbox.is_array() || bbox.size() != 4) {
        schema_fail(path + "/bbox", "expected [x_min, y_min, x_max, y_max]");
      }
      for (const auto& v : bbox) {
        if (!v.is_number()) schema_fail(path + "/bbox", "coordinates must be numbers");
      }
      a.box = {bbox[0].get<double>(), bbox[1].get<double>(), bbox[2].get<double>(),
               bbox[3].get<double>()};
      if (!a.box.well_ordered()) schema_fail(path + "/bbox", "requires x_min < x_max, y_min < y_max");
      a.center = a.box.center();
      if (const auto c = e.find("center"); c != e.end()) {
        if (!c->is_array() || c->size() != 2 || !(*c)[0].is_number() || !(*c)[1].is_number()) {
          schema_fail(path + "/center", "expected [x, y]");
        }
        a.center = {(*c)[0].get<double>(), (*c)[1].get<double>()};
        if (!a.box.contains(a.center)) schema_fail(path + "/center", "lies outside bbox");
      }
      const auto category = string_field(e, "category", path);
      const auto label = parse_label(category);
      if (!label) {
        schema_fail(path + "/category",
                    "unknown category '" + category + "' (expected mitotic_figure or imposter)");
      }
      a.label = *label;
      m.annotations.push_back(a);
    }
  }
  validate(m);
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, path.string() + ": cannot open manifest");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchemaError, path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

json to_json(const DatasetManifest& manifest) {
  json images = json::array();
  for (const auto& img : manifest.images) {
    images.push_back({{"id", img.id},
                      {"file_name", img.file_name},
                      {"width", img.width},
                      {"height", img.height},
                      {"scanner", img.scanner}});
  }
  json annotations = json::array();
  for (const auto& a : manifest.annotations) {
    annotations.push_back({{"id", a.id},
                           {"image_id", a.image_id},
                           {"bbox", {a.box.x_min, a.box.y_min, a.box.x_max, a.box.y_max}},
                           {"center", {a.center.x, a.center.y}},
                           {"category", std::string(to_string(a.label))}});
  }
  return {{"images", images}, {"annotations", annotations}};
}

ManifestIndex::ManifestIndex(const DatasetManifest& manifest) : manifest_(&manifest) {
  for (std::size_t i = 0; i < manifest.images.size(); ++i) {
    const auto& img = manifest.images[i];
    image_pos_[img.id] = i;
    annotations_[img.id];
    by_scanner_[img.scanner].push_back(img.id);
  }
  for (auto& [scanner, ids] : by_scanner_) std::sort(ids.begin(), ids.end());
  for (std::size_t i = 0; i < manifest.annotations.size(); ++i) {
    annotations_[manifest.annotations[i].image_id].push_back(i);
  }
}

const ImageEntry& ManifestIndex::image(std::int64_t id) const {
  const auto it = image_pos_.find(id);
  if (it == image_pos_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown image id " + std::to_string(id));
  }
  return manifest_->images[it->second];
}

const std::vector<std::size_t>& ManifestIndex::annotations_of(std::int64_t image_id) const {
  static const std::vector<std::size_t> kNone;
  const auto it = annotations_.find(image_id);
  return it == annotations_.end() ? kNone : it->second;
}

}  // namespace mitodg
