#include "hoikit/render/raster.h"

#include "hoikit/digest.h"
#include "hoikit/error.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hoikit::render {

namespace {

constexpr double kNear = 1e-9;

struct View {
  Vec3 eye, right, up, forward;
  double focal = 0.0;
  double cx = 0.0, cy = 0.0;

  explicit View(const Camera& c) {
    eye = c.eye;
    forward = (c.look_at - c.eye).normalized();
    right = forward.cross(c.up).normalized();
    up = right.cross(forward);
    focal = 0.5 * c.height / std::tan(0.5 * c.fov_deg * std::numbers::pi / 180.0);
    cx = 0.5 * c.width;
    cy = 0.5 * c.height;
  }

  // Screen x, y and view depth z.
  Vec3 project(const Vec3& p) const {
    const Vec3 d = p - eye;
    const double z = forward.dot(d);
    return Vec3(cx + focal * right.dot(d) / z, cy - focal * up.dot(d) / z, z);
  }
};

double edge(const Vec3& a, const Vec3& b, double px, double py) {
  return (b.x() - a.x()) * (py - a.y()) - (b.y() - a.y()) * (px - a.x());
}

std::uint8_t channel(double albedo, double shade) {
  const double v = std::round(255.0 * std::clamp(albedo, 0.0, 1.0) * shade);
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

}  // namespace

void Camera::validate() const {
  if (width <= 0 || height <= 0) throw InvalidArgument("camera viewport has zero area");
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw InvalidArgument("camera field of view must lie in (0, 180)");
  if (!eye.allFinite() || !look_at.allFinite() || !up.allFinite()) throw InvalidArgument("camera is not finite");
  if ((look_at - eye).norm() == 0.0) throw InvalidArgument("camera eye equals look_at");
  if ((look_at - eye).normalized().cross(up).norm() < 1e-12) throw InvalidArgument("camera up is parallel to the view");
}

Image Image::white(int width, int height) {
  if (width <= 0 || height <= 0) throw InvalidArgument("image has zero area");
  Image img;
  img.width = width;
  img.height = height;
  img.pixels.assign(3 * static_cast<std::size_t>(width) * height, 255);
  return img;
}

Image rasterize(std::span<const ColoredMesh> meshes, const Camera& camera) {
  camera.validate();
  const View view(camera);
  Image img = Image::white(camera.width, camera.height);
  std::vector<double> depth(static_cast<std::size_t>(camera.width) * camera.height, 0.0);  // stores 1/z

  for (const ColoredMesh& cm : meshes) {
    const auto& verts = cm.mesh.vertices;
    for (const auto& f : cm.mesh.faces) {
      if (f[0] >= verts.size() || f[1] >= verts.size() || f[2] >= verts.size())
        throw InvalidArgument("render: face index out of range");
      const Vec3& w0 = verts[f[0]];
      const Vec3& w1 = verts[f[1]];
      const Vec3& w2 = verts[f[2]];
      const Vec3 a = view.project(w0), b = view.project(w1), c = view.project(w2);
      if (!(a.z() > kNear && b.z() > kNear && c.z() > kNear)) continue;
      const double area = edge(a, b, c.x(), c.y());
      if (area == 0.0 || !std::isfinite(area)) continue;

      const Vec3 n = (w1 - w0).cross(w2 - w0);
      const Vec3 centroid = (w0 + w1 + w2) / 3.0;
      const Vec3 to_eye = view.eye - centroid;
      const double denom = n.norm() * to_eye.norm();
      const double shade = denom > 0.0 ? std::abs(n.dot(to_eye)) / denom : 0.0;
      const std::uint8_t rgb[3] = {channel(cm.color.x(), shade), channel(cm.color.y(), shade),
                                   channel(cm.color.z(), shade)};

      const double ia = 1.0 / a.z(), ib = 1.0 / b.z(), ic = 1.0 / c.z();
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.x(), b.x(), c.x()}) - 0.5)));
      const int x1 = std::min(camera.width - 1, static_cast<int>(std::ceil(std::max({a.x(), b.x(), c.x()}) - 0.5)));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.y(), b.y(), c.y()}) - 0.5)));
      const int y1 = std::min(camera.height - 1, static_cast<int>(std::ceil(std::max({a.y(), b.y(), c.y()}) - 0.5)));
      for (int y = y0; y <= y1; ++y) {
        const double py = y + 0.5;
        for (int x = x0; x <= x1; ++x) {
          const double px = x + 0.5;
          double l0 = edge(b, c, px, py) / area;
          double l1 = edge(c, a, px, py) / area;
          double l2 = edge(a, b, px, py) / area;
          if (l0 < 0.0 || l1 < 0.0 || l2 < 0.0) continue;
          const double inv_z = l0 * ia + l1 * ib + l2 * ic;
          const std::size_t idx = static_cast<std::size_t>(y) * camera.width + x;
          if (!(inv_z > depth[idx])) continue;
          depth[idx] = inv_z;
          std::copy(rgb, rgb + 3, &img.pixels[3 * idx]);
        }
      }
    }
  }
  return img;
}

Camera default_hoi_camera(const Vec3& lo, const Vec3& hi, int width, int height) {
  Camera cam;
  cam.width = width;
  cam.height = height;
  cam.fov_deg = kDefaultFovDeg;
  cam.look_at = 0.5 * (lo + hi);
  const double radius = 1.1 * 0.5 * (hi - lo).norm();
  const double vfov = cam.fov_deg * std::numbers::pi / 180.0;
  const double hfov = 2.0 * std::atan(std::tan(0.5 * vfov) * width / std::max(1, height));
  const double half = 0.5 * std::min(vfov, hfov);
  const double distance = radius > 0.0 ? radius / std::sin(half) : 1.0;
  cam.eye = cam.look_at + distance * Vec3(1.0, 1.0, 1.0).normalized();
  cam.up = Vec3(0.0, 1.0, 0.0);
  return cam;
}

std::string image_sha256(const Image& image) { return sha256_hex(image.pixels); }

}  // namespace hoikit::render
