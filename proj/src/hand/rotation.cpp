#include "hoikit/hand/rotation.h"

#include <cmath>

namespace hoikit::hand {

Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
  return m;
}

namespace {

Vec3 vee(const Mat3& m) { return Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)) / 2.0; }

}  // namespace

AxisAngleRotation rodrigues(const Vec3& r) {
  AxisAngleRotation out;
  const double theta = r.norm();
  const Mat3 K = skew(r);
  const Mat3 I = Mat3::Identity();
  if (theta < kSmallAngle) {
    out.R = I + K + 0.5 * K * K;
    for (int k = 0; k < 3; ++k) {
      const Mat3 E = skew(Vec3::Unit(k));
      out.dR[k] = E + 0.5 * (E * K + K * E);
    }
  } else {
    const double s = std::sin(theta), c = std::cos(theta);
    const Mat3 Kn = K / theta;
    out.R = I + s * Kn + (1.0 - c) * Kn * Kn;
    // dR/dr_k = (r_k [r]x + [r x (I - R) e_k]x) R / |r|^2.
    const Mat3 IminusR = I - out.R;
    for (int k = 0; k < 3; ++k) {
      const Vec3 col = r.cross(IminusR.col(k));
      out.dR[k] = (r[k] * K + skew(col)) * out.R / (theta * theta);
    }
  }
  for (int k = 0; k < 3; ++k) out.body[k] = vee(out.R.transpose() * out.dR[k]);
  return out;
}

}  // namespace hoikit::hand
