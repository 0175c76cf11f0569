#pragma once

#include "hoikit/geometry/types.h"

namespace hoikit::geometry::predicates {

/// Sign of det[b - a; c - a; d - a]: positive when d lies on the side of
/// plane (a, b, c) that (b - a) x (c - a) points to. Exact: a floating-point
/// filter falls back to rational arithmetic when the result is uncertain.
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// For a tetrahedron with orient3d(a, b, c, d) > 0: +1 if e is strictly
/// inside its circumsphere, -1 if strictly outside, 0 if on it. Exact.
int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e);

/// Circumradius of a tetrahedron; +infinity when it is flat.
double circumradius(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

}  // namespace hoikit::geometry::predicates
