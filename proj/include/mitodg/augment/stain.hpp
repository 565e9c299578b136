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

#include "mitodg/core/error.hpp"
#include "mitodg/core/image.hpp"
#include "mitodg/core/random.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace mitodg {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using RowVector3 = Eigen::Matrix<Scalar, 1, 3>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

/// Optical density of one byte value: -log10((v + 1) / 256), in [0, log10 256].
template <typename Scalar = double>
Scalar byte_to_od(std::uint8_t v) {
  using std::log10;
  return -log10((Scalar(v) + Scalar(1)) / Scalar(256));
}

/// Inverse of byte_to_od with rounding and clamping to [0, 255].
template <typename Scalar = double>
std::uint8_t od_to_byte(Scalar od) {
  using std::pow;
  const Scalar v = Scalar(256) * pow(Scalar(10), -od) - Scalar(1);
  return clamp_byte(static_cast<double>(v));
}

template <typename Scalar = double>
RowVector3<Scalar> rgb_to_od(const Rgb& p) {
  return {byte_to_od<Scalar>(p[0]), byte_to_od<Scalar>(p[1]), byte_to_od<Scalar>(p[2])};
}

template <typename Derived>
Rgb od_to_rgb(const Eigen::MatrixBase<Derived>& od) {
  return {od_to_byte(od(0)), od_to_byte(od(1)), od_to_byte(od(2))};
}

/// Rows are unit optical-density vectors for hematoxylin, eosin and a residual
/// channel. Construction enforces unit rows (1e-6) and |det| > 1e-6.
template <typename Scalar = double>
class StainBasis {
 public:
  using Matrix = Matrix3<Scalar>;

  static constexpr Scalar kNormTolerance = Scalar(1e-6);
  static constexpr Scalar kMinDeterminant = Scalar(1e-6);

  explicit StainBasis(const Matrix& rows) : rows_(rows) {
    for (int i = 0; i < 3; ++i) {
      if (std::abs(rows_.row(i).norm() - Scalar(1)) > kNormTolerance) {
        throw Error(ErrorCode::kInvalidArgument, "stain basis rows must have unit norm");
      }
    }
    if (std::abs(rows_.determinant()) <= kMinDeterminant) {
      throw Error(ErrorCode::kSingularBasis, "stain basis determinant is too small to invert");
    }
    inverse_ = rows_.inverse();
  }

  /// Normalizes the two stain vectors and completes the basis with their
  /// normalized cross product.
  static StainBasis from_stain_vectors(const Vector3<Scalar>& hematoxylin,
                                       const Vector3<Scalar>& eosin) {
    Matrix rows;
    rows.row(0) = hematoxylin.normalized().transpose();
    rows.row(1) = eosin.normalized().transpose();
    const Vector3<Scalar> residual = hematoxylin.cross(eosin);
    if (residual.norm() <= kMinDeterminant) {
      throw Error(ErrorCode::kSingularBasis, "stain vectors are parallel");
    }
    rows.row(2) = residual.normalized().transpose();
    return StainBasis(rows);
  }

  /// Ruifrok & Johnston H&E vectors.
  static StainBasis ruifrok_johnston() {
    return from_stain_vectors(Vector3<Scalar>(Scalar(0.650), Scalar(0.704), Scalar(0.286)),
                              Vector3<Scalar>(Scalar(0.072), Scalar(0.990), Scalar(0.105)));
  }

  const Matrix& matrix() const noexcept { return rows_; }
  const Matrix& inverse() const noexcept { return inverse_; }

 private:
  Matrix rows_;
  Matrix inverse_;
};

/// Per-stain affine perturbation S' = alpha * S + beta.
struct StainPerturbation {
  std::array<double, 3> alpha{1.0, 1.0, 1.0};
  std::array<double, 3> beta{0.0, 0.0, 0.0};
};

/// Deconvolves every pixel, applies the perturbation in stain space and
/// recomposes: OD' = ((OD * B^-1) .* alpha + beta) * B.
Rgb8Image apply_stain_perturbation(const Rgb8Image& image, const StainPerturbation& perturbation,
                                   const StainBasis<double>& basis);

/// Draws alpha_i ~ U(1 - sigma_alpha, 1 + sigma_alpha) for i = H, E, residual,
/// then beta_i ~ U(-sigma_beta, sigma_beta) in the same order.
StainPerturbation draw_stain_perturbation(double sigma_alpha, double sigma_beta, Generator& gen);

Rgb8Image he_stain_augment(const Rgb8Image& image, double sigma_alpha, double sigma_beta,
                           const StainBasis<double>& basis, Generator& gen);

}  // namespace mitodg
