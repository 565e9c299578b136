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

#include "mitodg/augment/fancy_pca.hpp"

#include "mitodg/core/error.hpp"

#include <Eigen/Eigenvalues>

namespace mitodg {

ColorPrincipalComponents color_principal_components(const Rgb8Image& image) {
  const Eigen::MatrixX3d x = image.pixels().cast<double>() / 255.0;
  const Eigen::RowVector3d mean = x.colwise().mean();
  const Eigen::MatrixX3d centered = x.rowwise() - mean;
  const Eigen::Matrix3d cov = centered.transpose() * centered / static_cast<double>(x.rows());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  ColorPrincipalComponents pcs;
  for (int k = 0; k < 3; ++k) {
    // Solver returns ascending order.
    pcs.eigenvalues(k) = std::max(0.0, solver.eigenvalues()(2 - k));
    Eigen::Vector3d v = solver.eigenvectors().col(2 - k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    pcs.eigenvectors.col(k) = v;
  }
  return pcs;
}

Rgb8Image fancy_pca_with_coefficients(const Rgb8Image& image, const Eigen::Vector3d& coefficients) {
  const auto pcs = color_principal_components(image);
  const Eigen::Vector3d shift =
      255.0 * pcs.eigenvectors * coefficients.cwiseProduct(pcs.eigenvalues);
  Rgb8Image out = image;
  auto dst = out.pixels();
  const auto src = image.pixels();
  for (Eigen::Index i = 0; i < dst.rows(); ++i)
    for (int c = 0; c < 3; ++c) dst(i, c) = clamp_byte(src(i, c) + shift(c));
  return out;
}

Rgb8Image fancy_pca(const Rgb8Image& image, double sigma, Generator& gen) {
  if (sigma < 0) throw Error(ErrorCode::kInvalidArgument, "fancy PCA sigma must be non-negative");
  Eigen::Vector3d a;
  for (int k = 0; k < 3; ++k) a(k) = gen.normal(0.0, sigma);
  return fancy_pca_with_coefficients(image, a);
}

}  // namespace mitodg
