#pragma once

#include "hoikit/geometry/types.h"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hoikit::render {

using geometry::Vec3;

inline constexpr int kDefaultImageSize = 512;
inline constexpr double kDefaultFovDeg = 45.0;

struct Camera {
  Vec3 eye = Vec3(0.0, 0.0, 1.0);
  Vec3 look_at = Vec3::Zero();
  Vec3 up = Vec3(0.0, 1.0, 0.0);
  /// Vertical field of view in degrees.
  double fov_deg = kDefaultFovDeg;
  int width = kDefaultImageSize;
  int height = kDefaultImageSize;

  void validate() const;
};

/// 8-bit RGB, row-major from the top-left pixel.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  static Image white(int width, int height);
  const std::uint8_t* at(int x, int y) const { return &pixels[3 * (static_cast<std::size_t>(y) * width + x)]; }
};

struct ColoredMesh {
  geometry::TriMesh mesh;
  /// Flat albedo in [0, 1].
  Vec3 color = Vec3::Ones();
};

/// Perspective z-buffer rasterization with one headlight at the eye.
///
/// Each face is shaded flat: channel = round(255 * color * |cos|), where cos
/// is between the face normal and the direction from the face centroid to
/// the eye. A pixel is covered when its centre lies inside or on the
/// projected triangle; depth is 1/z interpolated in screen space. A fragment
/// replaces the stored one only if strictly closer, so depth ties keep the
/// lower mesh id, then the lower face id. Faces with a vertex at or behind
/// the near plane (z <= 1e-9 along the view axis) are skipped, as are faces
/// of zero projected area. All arithmetic is double precision in the order
/// written in raster.cpp.
Image rasterize(std::span<const ColoredMesh> meshes, const Camera& camera);

/// Frames the box [lo, hi] grown by 10% of its half diagonal. The eye looks
/// at the box centre from direction normalize(1, 1, 1), at the distance where
/// the grown bounding sphere fits the smaller field of view; zero-extent
/// bounds use distance 1.0.
Camera default_hoi_camera(const Vec3& lo, const Vec3& hi, int width = kDefaultImageSize,
                          int height = kDefaultImageSize);

/// Lowercase hex SHA-256 of the pixel buffer.
std::string image_sha256(const Image& image);

}  // namespace hoikit::render
