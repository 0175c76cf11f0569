#pragma once

#include "hoikit/geometry/types.h"

#include <array>

namespace hoikit::hand {

using geometry::Mat3;
using geometry::Vec3;

/// Rotation matrix of an axis-angle vector together with its partial
/// derivatives dR/dr_k and the body-frame generators w_k = vee(R^T dR/dr_k).
struct AxisAngleRotation {
  Mat3 R = Mat3::Identity();
  std::array<Mat3, 3> dR{};
  std::array<Vec3, 3> body{};
};

/// Below this angle the second-order series is used for R and dR.
inline constexpr double kSmallAngle = 1e-8;

AxisAngleRotation rodrigues(const Vec3& r);

/// Skew-symmetric cross-product matrix: skew(a) * b = a x b.
Mat3 skew(const Vec3& a);

}  // namespace hoikit::hand
