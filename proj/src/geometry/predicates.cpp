#include "hoikit/geometry/predicates.h"

#include <gmpxx.h>

#include <cmath>
#include <limits>

namespace hoikit::geometry::predicates {
namespace {

// Relative filter width. Far wider than the rounding error of the double
// evaluation, so a result outside the band always has the exact sign.
constexpr double kFilter = 1e-12;

template <typename T>
T det3(const T& a0, const T& a1, const T& a2, const T& b0, const T& b1, const T& b2, const T& c0,
       const T& c1, const T& c2) {
  return a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0);
}

int sign_of(const mpq_class& v) { return sgn(v); }

int orient3d_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const mpq_class ax(a.x()), ay(a.y()), az(a.z());
  const mpq_class bx = mpq_class(b.x()) - ax, by = mpq_class(b.y()) - ay, bz = mpq_class(b.z()) - az;
  const mpq_class cx = mpq_class(c.x()) - ax, cy = mpq_class(c.y()) - ay, cz = mpq_class(c.z()) - az;
  const mpq_class dx = mpq_class(d.x()) - ax, dy = mpq_class(d.y()) - ay, dz = mpq_class(d.z()) - az;
  return sign_of(det3<mpq_class>(bx, by, bz, cx, cy, cz, dx, dy, dz));
}

int insphere_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
  const mpq_class ex(e.x()), ey(e.y()), ez(e.z());
  mpq_class m[4][4];
  const Vec3* pts[4] = {&a, &b, &c, &d};
  for (int i = 0; i < 4; ++i) {
    m[i][0] = mpq_class(pts[i]->x()) - ex;
    m[i][1] = mpq_class(pts[i]->y()) - ey;
    m[i][2] = mpq_class(pts[i]->z()) - ez;
    m[i][3] = m[i][0] * m[i][0] + m[i][1] * m[i][1] + m[i][2] * m[i][2];
  }
  // Laplace expansion along the lift column.
  mpq_class det = 0;
  for (int i = 0; i < 4; ++i) {
    int r[3], n = 0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) r[n++] = j;
    }
    const mpq_class minor = det3<mpq_class>(m[r[0]][0], m[r[0]][1], m[r[0]][2], m[r[1]][0],
                                            m[r[1]][1], m[r[1]][2], m[r[2]][0], m[r[2]][1],
                                            m[r[2]][2]);
    const mpq_class term = m[i][3] * minor;
    // Cofactor sign for column 3: (-1)^(i + 3).
    if ((i + 3) % 2 == 0) {
      det += term;
    } else {
      det -= term;
    }
  }
  return -sign_of(det);
}

}  // namespace

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 u = b - a, v = c - a, w = d - a;
  const double det = det3(u.x(), u.y(), u.z(), v.x(), v.y(), v.z(), w.x(), w.y(), w.z());
  const Vec3 au = u.cwiseAbs(), av = v.cwiseAbs(), aw = w.cwiseAbs();
  const double permanent = au.x() * (av.y() * aw.z() + av.z() * aw.y()) +
                           au.y() * (av.x() * aw.z() + av.z() * aw.x()) +
                           au.z() * (av.x() * aw.y() + av.y() * aw.x());
  if (std::abs(det) > kFilter * permanent) return det > 0 ? 1 : -1;
  return orient3d_exact(a, b, c, d);
}

int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
  double m[4][4], am[4][4];
  const Vec3* pts[4] = {&a, &b, &c, &d};
  for (int i = 0; i < 4; ++i) {
    const Vec3 p = *pts[i] - e;
    m[i][0] = p.x();
    m[i][1] = p.y();
    m[i][2] = p.z();
    m[i][3] = p.squaredNorm();
    for (int j = 0; j < 4; ++j) am[i][j] = std::abs(m[i][j]);
  }
  double det = 0.0, permanent = 0.0;
  for (int i = 0; i < 4; ++i) {
    int r[3], n = 0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) r[n++] = j;
    }
    const double minor = det3(m[r[0]][0], m[r[0]][1], m[r[0]][2], m[r[1]][0], m[r[1]][1],
                              m[r[1]][2], m[r[2]][0], m[r[2]][1], m[r[2]][2]);
    // Upper bound of |minor| including every product term.
    const double aminor =
        am[r[0]][0] * (am[r[1]][1] * am[r[2]][2] + am[r[1]][2] * am[r[2]][1]) +
        am[r[0]][1] * (am[r[1]][0] * am[r[2]][2] + am[r[1]][2] * am[r[2]][0]) +
        am[r[0]][2] * (am[r[1]][0] * am[r[2]][1] + am[r[1]][1] * am[r[2]][0]);
    const double term = m[i][3] * minor;
    det += (i % 2 == 1) ? term : -term;
    permanent += am[i][3] * aminor;
  }
  if (std::abs(det) > kFilter * permanent) return det > 0 ? -1 : 1;
  return insphere_exact(a, b, c, d, e);
}

double circumradius(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 u = b - a, v = c - a, w = d - a;
  const double denom = 2.0 * u.dot(v.cross(w));
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  const Vec3 center =
      (u.squaredNorm() * v.cross(w) + v.squaredNorm() * w.cross(u) + w.squaredNorm() * u.cross(v)) /
      denom;
  return center.norm();
}

}  // namespace hoikit::geometry::predicates
