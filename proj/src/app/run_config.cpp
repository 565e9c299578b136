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

#include "mitodg/app/run_config.hpp"

#include "mitodg/core/error.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace mitodg {

using nlohmann::json;

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSchemaError, "run config " + path + ": " + what);
}

using Handler = std::function<void(const json&, const std::string&)>;

/// Dispatches each key of `obj` to its handler; unknown keys are errors.
void read_object(const json& obj, const std::string& path,
                 const std::map<std::string, Handler>& handlers) {
  if (!obj.is_object()) schema_fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) schema_fail(path + "/" + key, "unknown key");
    try {
      it->second(value, path + "/" + key);
    } catch (const json::exception& e) {
      schema_fail(path + "/" + key, e.what());
    }
  }
}

template <typename T>
Handler set(T& target) {
  return [&target](const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) schema_fail(path, "expected a boolean");
    } else if constexpr (std::is_arithmetic_v<T>) {
      if (!v.is_number()) schema_fail(path, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) schema_fail(path, "expected a string");
    }
    target = v.get<T>();
  };
}

Handler set_interval(Interval& target) {
  return [&target](const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) schema_fail(path, "expected [lo, hi]");
    target = {v[0].get<double>(), v[1].get<double>()};
  };
}

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }

std::string rule_name(MergeRule rule) {
  return rule == MergeRule::kCenterDistance ? "center_distance" : "iou_nms";
}

std::string draw_name(AnnotationDraw draw) {
  return draw == AnnotationDraw::kUniform ? "uniform" : "stratified";
}

}  // namespace

json to_json(const MatchConfig& c) {
  return {{"radius", c.radius},
          {"class_filter", c.class_filter ? json(std::string(to_string(*c.class_filter))) : json("all")}};
}

json to_json(const DeParams& p) {
  json bounds = json::array();
  for (const auto& b : p.bounds) bounds.push_back(interval_json(b));
  return {{"population", p.population},       {"mutation", interval_json(p.mutation)},
          {"crossover", p.crossover},         {"max_generations", p.max_generations},
          {"tolerance", p.tolerance},         {"bounds", bounds},
          {"workers", p.workers}};
}

json to_json(const AnchorConfig& c) {
  json levels = json::array();
  for (const auto& l : c.levels) levels.push_back({{"stride", l.stride}, {"base_size", l.base_size}});
  return {{"levels", levels}, {"ratios", c.ratios}, {"scales", c.scales}};
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  read_object(j, "", {
      {"seed", [&](const json& v, const std::string& path) {
         if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
           schema_fail(path, "expected a non-negative integer");
         }
         c.seed = v.get<std::uint64_t>();
       }},
      {"workers", set(c.workers)},
      {"policy", [&](const json& v, const std::string&) { c.policy = policy_from_json(v); }},
      {"patch", [&](const json& v, const std::string& path) {
         read_object(v, path, {
             {"size", set(c.patch.size)},
             {"require_full_annotation", set(c.patch.require_full_annotation)},
             {"min_visible_fraction", set(c.patch.min_visible_fraction)},
             {"draw", [&](const json& d, const std::string& p) {
                const auto name = d.get<std::string>();
                if (name == "uniform") c.patch.draw = AnnotationDraw::kUniform;
                else if (name == "stratified") c.patch.draw = AnnotationDraw::kStratified;
                else schema_fail(p, "expected \"uniform\" or \"stratified\"");
              }},
         });
       }},
      {"tiling", [&](const json& v, const std::string& path) {
         read_object(v, path, {{"tile", set(c.tiling.tile)}, {"overlap", set(c.tiling.overlap)}});
       }},
      {"merge", [&](const json& v, const std::string& path) {
         read_object(v, path, {
             {"radius", set(c.merge.radius)},
             {"iou_threshold", set(c.merge.iou_threshold)},
             {"rule", [&](const json& d, const std::string& p) {
                const auto name = d.get<std::string>();
                if (name == "center_distance") c.merge.rule = MergeRule::kCenterDistance;
                else if (name == "iou_nms") c.merge.rule = MergeRule::kIouNms;
                else schema_fail(p, "expected \"center_distance\" or \"iou_nms\"");
              }},
         });
       }},
      {"match", [&](const json& v, const std::string& path) {
         read_object(v, path, {
             {"radius", set(c.match.radius)},
             {"class_filter", [&](const json& d, const std::string& p) {
                const auto name = d.get<std::string>();
                if (name == "all") {
                  c.match.class_filter.reset();
                } else if (auto label = parse_label(name)) {
                  c.match.class_filter = *label;
                } else {
                  schema_fail(p, "expected \"mitotic_figure\", \"imposter\" or \"all\"");
                }
              }},
         });
       }},
      {"anchors", [&](const json& v, const std::string& path) {
         read_object(v, path, {
             {"ratios", set(c.anchors.ratios)},
             {"scales", set(c.anchors.scales)},
             {"levels", [&](const json& d, const std::string& p) {
                if (!d.is_array()) schema_fail(p, "expected an array");
                c.anchors.levels.clear();
                for (const auto& l : d) {
                  PyramidLevel level;
                  read_object(l, p, {{"stride", set(level.stride)}, {"base_size", set(level.base_size)}});
                  c.anchors.levels.push_back(level);
                }
              }},
         });
       }},
      {"de", [&](const json& v, const std::string& path) {
         read_object(v, path, {
             {"population", set(c.de.population)},
             {"mutation", set_interval(c.de.mutation)},
             {"crossover", set(c.de.crossover)},
             {"max_generations", set(c.de.max_generations)},
             {"tolerance", set(c.de.tolerance)},
             {"workers", set(c.de.workers)},
             {"bounds", [&](const json& d, const std::string& p) {
                if (!d.is_array()) schema_fail(p, "expected an array of [lo, hi]");
                c.de.bounds.clear();
                for (const auto& b : d) {
                  Interval i;
                  set_interval(i)(b, p);
                  c.de.bounds.push_back(i);
                }
              }},
         });
       }},
      {"pipeline", [&](const json& v, const std::string& path) {
         auto& m = c.pipeline.mock;
         read_object(v, path, {
             {"n_folds", set(c.pipeline.n_folds)},
             {"fold", set(c.pipeline.fold)},
             {"per_scanner_threshold", set(c.pipeline.per_scanner_threshold)},
             {"mock_detector", [&](const json& d, const std::string& p) {
                read_object(d, p, {
                    {"dropout", set(m.dropout)},
                    {"false_positive_rate", set(m.false_positive_rate)},
                    {"center_jitter", set(m.center_jitter)},
                    {"tp_confidence_lo", set(m.tp_confidence_lo)},
                    {"tp_confidence_hi", set(m.tp_confidence_hi)},
                    {"fp_confidence_lo", set(m.fp_confidence_lo)},
                    {"fp_confidence_hi", set(m.fp_confidence_hi)},
                    {"fp_box_size", set(m.fp_box_size)},
                });
              }},
         });
       }},
      {"paths", [&](const json& v, const std::string& path) {
         read_object(v, path, {
             {"manifest", set(c.paths.manifest)},
             {"image_root", set(c.paths.image_root)},
             {"output_dir", set(c.paths.output_dir)},
         });
       }},
  });
  return c;
}

json to_json(const RunConfig& c) {
  const auto& m = c.pipeline.mock;
  json out = {
      {"workers", c.workers},
      {"policy", to_json(c.policy)},
      {"patch",
       {{"size", c.patch.size},
        {"require_full_annotation", c.patch.require_full_annotation},
        {"min_visible_fraction", c.patch.min_visible_fraction},
        {"draw", draw_name(c.patch.draw)}}},
      {"tiling", {{"tile", c.tiling.tile}, {"overlap", c.tiling.overlap}}},
      {"merge",
       {{"rule", rule_name(c.merge.rule)},
        {"radius", c.merge.radius},
        {"iou_threshold", c.merge.iou_threshold}}},
      {"match", to_json(c.match)},
      {"anchors", to_json(c.anchors)},
      {"de", to_json(c.de)},
      {"pipeline",
       {{"n_folds", c.pipeline.n_folds},
        {"fold", c.pipeline.fold},
        {"per_scanner_threshold", c.pipeline.per_scanner_threshold},
        {"mock_detector",
         {{"dropout", m.dropout},
          {"false_positive_rate", m.false_positive_rate},
          {"center_jitter", m.center_jitter},
          {"tp_confidence_lo", m.tp_confidence_lo},
          {"tp_confidence_hi", m.tp_confidence_hi},
          {"fp_confidence_lo", m.fp_confidence_lo},
          {"fp_confidence_hi", m.fp_confidence_hi},
          {"fp_box_size", m.fp_box_size}}}}},
      {"paths",
       {{"manifest", c.paths.manifest},
        {"image_root", c.paths.image_root},
        {"output_dir", c.paths.output_dir}}},
  };
  if (c.seed) out["seed"] = *c.seed;
  return out;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, path.string() + ": cannot open run config");
  try {
    return run_config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchemaError, path.string() + ": " + e.what());
  }
}

}  // namespace mitodg
