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
#include "mitodg/core/random.hpp"

#include <Eigen/Core>

namespace mitodg {

/// Eigen decomposition of the RGB covariance (channels scaled to [0, 1],
/// population normalization). Eigenvalues are sorted descending and each
/// eigenvector is signed so its largest-magnitude component is positive.
struct ColorPrincipalComponents {
  Eigen::Vector3d eigenvalues;
  Eigen::Matrix3d eigenvectors;  // column k pairs with eigenvalues(k)
};

ColorPrincipalComponents color_principal_components(const Rgb8Image& image);

/// Adds sum_k coefficients(k) * lambda_k * e_k (rescaled to bytes) to every pixel.
Rgb8Image fancy_pca_with_coefficients(const Rgb8Image& image, const Eigen::Vector3d& coefficients);

/// Draws a_k ~ N(0, sigma), k = 1..3, once per image.
Rgb8Image fancy_pca(const Rgb8Image& image, double sigma, Generator& gen);

}  // namespace mitodg
