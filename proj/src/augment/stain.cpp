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

#include "mitodg/augment/stain.hpp"

namespace mitodg {

Rgb8Image apply_stain_perturbation(const Rgb8Image& image, const StainPerturbation& perturbation,
                                   const StainBasis<double>& basis) {
  std::array<double, 256> od_lut{};
  for (int v = 0; v < 256; ++v) od_lut[v] = byte_to_od<double>(static_cast<std::uint8_t>(v));

  const auto pixels = image.pixels();
  Eigen::MatrixX3d od(pixels.rows(), 3);
  for (Eigen::Index i = 0; i < pixels.rows(); ++i)
    for (int c = 0; c < 3; ++c) od(i, c) = od_lut[pixels(i, c)];

  const Eigen::RowVector3d alpha(perturbation.alpha[0], perturbation.alpha[1],
                                 perturbation.alpha[2]);
  const Eigen::RowVector3d beta(perturbation.beta[0], perturbation.beta[1], perturbation.beta[2]);

  Eigen::MatrixX3d stains = od * basis.inverse();
  stains = (stains.array().rowwise() * alpha.array()).rowwise() + beta.array();
  const Eigen::MatrixX3d recomposed = stains * basis.matrix();

  Rgb8Image out = image;
  auto dst = out.pixels();
  for (Eigen::Index i = 0; i < dst.rows(); ++i)
    for (int c = 0; c < 3; ++c) dst(i, c) = od_to_byte(recomposed(i, c));
  return out;
}

StainPerturbation draw_stain_perturbation(double sigma_alpha, double sigma_beta, Generator& gen) {
  StainPerturbation p;
  for (auto& a : p.alpha) a = gen.uniform(1.0 - sigma_alpha, 1.0 + sigma_alpha);
  for (auto& b : p.beta) b = gen.uniform(-sigma_beta, sigma_beta);
  return p;
}

Rgb8Image he_stain_augment(const Rgb8Image& image, double sigma_alpha, double sigma_beta,
                           const StainBasis<double>& basis, Generator& gen) {
  if (sigma_alpha < 0 || sigma_beta < 0) {
    throw Error(ErrorCode::kInvalidArgument, "stain sigmas must be non-negative");
  }
  return apply_stain_perturbation(image, draw_stain_perturbation(sigma_alpha, sigma_beta, gen),
                                  basis);
}

}  // namespace mitodg
