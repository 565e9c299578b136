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

#include "mitodg/augment/policy.hpp"

#include "mitodg/core/error.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace mitodg {

using nlohmann::json;

namespace {

struct DoubleParam {
  const char* name;
  double TransformParams::*member;
};

constexpr DoubleParam kDoubleParams[] = {
    {"solarize_threshold_span", &TransformParams::solarize_threshold_span},
    {"solarize_add_max", &TransformParams::solarize_add_max},
    {"posterize_max_drop", &TransformParams::posterize_max_drop},
    {"blur_sigma_max", &TransformParams::blur_sigma_max},
    {"noise_sigma_max", &TransformParams::noise_sigma_max},
    {"cutout_fraction", &TransformParams::cutout_fraction},
    {"clahe_clip_base", &TransformParams::clahe_clip_base},
    {"clahe_clip_gain", &TransformParams::clahe_clip_gain},
    {"jpeg_quality_drop", &TransformParams::jpeg_quality_drop},
    {"color_jitter_range", &TransformParams::color_jitter_range},
    {"hue_max_degrees", &TransformParams::hue_max_degrees},
    {"saturation_range", &TransformParams::saturation_range},
    {"contrast_range", &TransformParams::contrast_range},
    {"sharpness_gain", &TransformParams::sharpness_gain},
    {"iso_intensity_max", &TransformParams::iso_intensity_max},
    {"iso_hue_sigma_max", &TransformParams::iso_hue_sigma_max},
    {"fancy_pca_sigma_max", &TransformParams::fancy_pca_sigma_max},
    {"he_sigma_max", &TransformParams::he_sigma_max},
};

[[noreturn]] void parse_fail(const std::string& what) {
  throw Error(ErrorCode::kPolicyParseError, what);
}

double number_field(const json& j, const char* key) {
  if (!j.is_number()) parse_fail(std::string("'") + key + "' must be a number");
  return j.get<double>();
}

void check_box_inside(const Annotation& a, int width, int height) {
  if (a.box.x_min < 0 || a.box.y_min < 0 || a.box.x_max > width || a.box.y_max > height) {
    throw Error(ErrorCode::kOutOfBounds,
                "annotation " + std::to_string(a.id) + " lies outside the image");
  }
}

}  // namespace

void validate(const PolicyConfig& policy) {
  if (policy.pool.empty()) throw Error(ErrorCode::kEmptyPool, "augmentation pool is empty");
  std::set<TransformKind> seen(policy.pool.begin(), policy.pool.end());
  if (seen.size() != policy.pool.size()) {
    throw Error(ErrorCode::kInvalidArgument, "augmentation pool lists a transform twice");
  }
  if (!(policy.max_strength > 0.0 && policy.max_strength <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "max_strength must lie in (0, 1]");
  }
  for (double p : {policy.flip_h_prob, policy.flip_v_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "flip probabilities must lie in [0, 1]");
    }
  }
}

Annotation flip_annotation_horizontal(const Annotation& a, int width) {
  Annotation out = a;
  out.box.x_min = width - a.box.x_max;
  out.box.x_max = width - a.box.x_min;
  out.center.x = width - a.center.x;
  return out;
}

Annotation flip_annotation_vertical(const Annotation& a, int height) {
  Annotation out = a;
  out.box.y_min = height - a.box.y_max;
  out.box.y_max = height - a.box.y_min;
  out.center.y = height - a.center.y;
  return out;
}

AugmentationLog draw_policy(const PolicyConfig& policy, const RandomStream& rng) {
  validate(policy);
  Generator gen = rng.derive("policy").generator();
  AugmentationLog log;
  log.flipped_h = gen.bernoulli(policy.flip_h_prob);
  log.flipped_v = gen.bernoulli(policy.flip_v_prob);
  if (policy.channel_permute) log.channel_perm = kChannelPermutations[gen.below(6)];
  log.chosen = policy.pool[gen.below(policy.pool.size())];
  log.strength = gen.uniform(0.0, policy.max_strength);
  return log;
}

AugmentResult apply_policy(const Rgb8Image& image, const std::vector<Annotation>& boxes,
                           const AugmentationLog& decisions, const TransformParams& params,
                           const RandomStream& rng) {
  for (const auto& a : boxes) check_box_inside(a, image.width(), image.height());

  AugmentResult result{image, boxes, decisions};
  result.log.inner_draws.clear();
  if (decisions.flipped_h) {
    result.image = flip_horizontal(result.image);
    for (auto& a : result.boxes) a = flip_annotation_horizontal(a, image.width());
  }
  if (decisions.flipped_v) {
    result.image = flip_vertical(result.image);
    for (auto& a : result.boxes) a = flip_annotation_vertical(a, image.height());
  }
  if (decisions.channel_perm != ChannelPermutation{0, 1, 2}) {
    result.image = permute_channels(result.image, decisions.channel_perm);
  }
  result.image = apply_transform(decisions.chosen, decisions.strength, result.image,
                                 rng.derive("transform"), params, &result.log.inner_draws);
  return result;
}

AugmentResult augment(const Rgb8Image& image, const std::vector<Annotation>& boxes,
                      const PolicyConfig& policy, const RandomStream& rng) {
  return apply_policy(image, boxes, draw_policy(policy, rng), policy.params, rng);
}

PolicyConfig policy_from_json(const json& j) {
  if (!j.is_object()) parse_fail("policy must be a JSON object");
  PolicyConfig policy;
  for (const auto& [key, value] : j.items()) {
    if (key == "pool") {
      if (value.is_string() && value.get<std::string>() == "all") continue;
      if (!value.is_array()) parse_fail("'pool' must be an array of transform names or \"all\"");
      policy.pool.clear();
      for (const auto& entry : value) {
        if (!entry.is_string()) parse_fail("'pool' entries must be strings");
        const auto name = entry.get<std::string>();
        const auto kind = parse_transform_kind(name);
        if (!kind) parse_fail("unknown transform '" + name + "'");
        policy.pool.push_back(*kind);
      }
    } else if (key == "max_strength") {
      policy.max_strength = number_field(value, "max_strength");
    } else if (key == "flip_h_prob") {
      policy.flip_h_prob = number_field(value, "flip_h_prob");
    } else if (key == "flip_v_prob") {
      policy.flip_v_prob = number_field(value, "flip_v_prob");
    } else if (key == "channel_permute") {
      if (!value.is_boolean()) parse_fail("'channel_permute' must be a boolean");
      policy.channel_permute = value.get<bool>();
    } else if (key == "params") {
      if (!value.is_object()) parse_fail("'params' must be an object");
      for (const auto& [pkey, pvalue] : value.items()) {
        if (pkey == "cutout_fill") {
          policy.params.cutout_fill = static_cast<int>(number_field(pvalue, "cutout_fill"));
          continue;
        }
        if (pkey == "clahe_grid") {
          policy.params.clahe_grid = static_cast<int>(number_field(pvalue, "clahe_grid"));
          continue;
        }
        const auto it = std::find_if(std::begin(kDoubleParams), std::end(kDoubleParams),
                                     [&](const DoubleParam& p) { return pkey == p.name; });
        if (it == std::end(kDoubleParams)) parse_fail("unknown transform parameter '" + pkey + "'");
        policy.params.*(it->member) = number_field(pvalue, it->name);
      }
    } else {
      parse_fail("unknown policy key '" + key + "'");
    }
  }
  try {
    validate(policy);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptyPool) throw;
    parse_fail(e.what());
  }
  return policy;
}

json to_json(const PolicyConfig& policy) {
  json pool = json::array();
  for (auto kind : policy.pool) pool.push_back(std::string(to_string(kind)));
  json params = json::object();
  for (const auto& p : kDoubleParams) params[p.name] = policy.params.*(p.member);
  params["cutout_fill"] = policy.params.cutout_fill;
  params["clahe_grid"] = policy.params.clahe_grid;
  return {{"pool", pool},
          {"max_strength", policy.max_strength},
          {"flip_h_prob", policy.flip_h_prob},
          {"flip_v_prob", policy.flip_v_prob},
          {"channel_permute", policy.channel_permute},
          {"params", params}};
}

json to_json(const AugmentationLog& log) {
  json draws = json::array();
  for (const auto& d : log.inner_draws) draws.push_back({{"name", d.name}, {"value", d.value}});
  return {{"flipped_h", log.flipped_h},
          {"flipped_v", log.flipped_v},
          {"channel_perm", log.channel_perm},
          {"chosen", std::string(to_string(log.chosen))},
          {"strength", log.strength},
          {"inner_draws", draws}};
}

}  // namespace mitodg
