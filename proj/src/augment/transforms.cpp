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

#include "mitodg/augment/transforms.hpp"

#include "mitodg/augment/fancy_pca.hpp"
#include "mitodg/augment/kernels.hpp"
#include "mitodg/augment/stain.hpp"
#include "mitodg/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace mitodg {

namespace {

struct Recorder {
  DrawLog* log;
  double operator()(const char* name, double value) const {
    if (log) log->push_back({name, value});
    return value;
  }
};

const StainBasis<double>& default_stain_basis() {
  static const auto basis = StainBasis<double>::ruifrok_johnston();
  return basis;
}

}  // namespace

Rgb8Image apply_transform(TransformKind kind, double strength, const Rgb8Image& image,
                          const RandomStream& rng, const TransformParams& params, DrawLog* log) {
  if (!(strength >= 0.0 && strength <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "strength must lie in [0, 1]");
  }
  if (strength == 0.0) return image;

  const double s = strength;
  const Recorder rec{log};
  Generator gen = rng.generator();
  auto factor = [&](const char* name, double range) {
    return rec(name, gen.uniform(1.0 - range * s, 1.0 + range * s));
  };

  switch (kind) {
    case TransformKind::kColorJitter: {
      const double b = factor("brightness", params.color_jitter_range);
      const double c = factor("contrast", params.color_jitter_range);
      const double sat = factor("saturation", params.color_jitter_range);
      return kernels::color_jitter(image, b, c, sat);
    }
    case TransformKind::kHeStain: {
      const double sigma = rec("sigma", params.he_sigma_max * s);
      const auto p = draw_stain_perturbation(sigma, sigma, gen);
      rec("alpha_h", p.alpha[0]);
      rec("alpha_e", p.alpha[1]);
      rec("alpha_residual", p.alpha[2]);
      rec("beta_h", p.beta[0]);
      rec("beta_e", p.beta[1]);
      rec("beta_residual", p.beta[2]);
      return apply_stain_perturbation(image, p, default_stain_basis());
    }
    case TransformKind::kFancyPca: {
      const double sigma = rec("sigma", params.fancy_pca_sigma_max * s);
      Eigen::Vector3d a;
      a(0) = rec("a1", gen.normal(0.0, sigma));
      a(1) = rec("a2", gen.normal(0.0, sigma));
      a(2) = rec("a3", gen.normal(0.0, sigma));
      return fancy_pca_with_coefficients(image, a);
    }
    case TransformKind::kHue: {
      const double range = params.hue_max_degrees * s;
      return kernels::hue_shift(image, rec("degrees", gen.uniform(-range, range)));
    }
    case TransformKind::kSaturation:
      return kernels::saturation(image, factor("factor", params.saturation_range));
    case TransformKind::kEqualize:
      return kernels::equalize(image, rec("blend", s));
    case TransformKind::kRandomContrast:
      return kernels::channel_contrast(image, factor("factor", params.contrast_range));
    case TransformKind::kAutoContrast:
      return kernels::auto_contrast(image, rec("blend", s));
    case TransformKind::kClahe: {
      const double clip = rec("clip_limit", params.clahe_clip_base + params.clahe_clip_gain * s);
      return kernels::clahe(image, clip, params.clahe_grid);
    }
    case TransformKind::kSolarize:
      return kernels::solarize(image, rec("threshold", params.solarize_threshold_span * (1.0 - s)));
    case TransformKind::kSolarizeAdd: {
      const auto amount = static_cast<int>(std::lround(params.solarize_add_max * s));
      return kernels::solarize_add(image, static_cast<int>(rec("amount", amount)));
    }
    case TransformKind::kSharpness:
      return kernels::sharpness(image, rec("factor", 1.0 + params.sharpness_gain * s));
    case TransformKind::kGaussianBlur:
      return kernels::gaussian_blur(image, rec("sigma", params.blur_sigma_max * s));
    case TransformKind::kPosterize: {
      const auto bits = 8 - static_cast<int>(std::lround(params.posterize_max_drop * s));
      return kernels::posterize(image, static_cast<int>(rec("bits", std::clamp(bits, 0, 8))));
    }
    case TransformKind::kCutout: {
      const int side = static_cast<int>(std::lround(params.cutout_fraction * s *
                                                    std::min(image.width(), image.height())));
      rec("side", side);
      if (side <= 0) return image;
      const PixelPoint origin{static_cast<int>(gen.between(0, image.width() - side)),
                              static_cast<int>(gen.between(0, image.height() - side))};
      rec("x", origin.x);
      rec("y", origin.y);
      return kernels::cutout(image, origin, side,
                             static_cast<std::uint8_t>(std::clamp(params.cutout_fill, 0, 255)));
    }
    case TransformKind::kIsoNoise: {
      const double intensity = rec("intensity", params.iso_intensity_max * s);
      const double hue_sigma = rec("hue_sigma", params.iso_hue_sigma_max * s);
      return kernels::iso_noise(image, intensity, hue_sigma, gen);
    }
    case TransformKind::kJpegArtifacts: {
      const auto quality = static_cast<int>(std::lround(100.0 - params.jpeg_quality_drop * s));
      return kernels::jpeg_roundtrip(image, static_cast<int>(rec("quality", std::clamp(quality, 1, 100))));
    }
    case TransformKind::kPixelwiseChannelShuffle:
      return kernels::pixelwise_channel_shuffle(image, rec("probability", s), gen);
    case TransformKind::kGaussianNoise:
      return kernels::gaussian_noise(image, rec("sigma", params.noise_sigma_max * s), gen);
  }
  return image;
}

}  // namespace mitodg
