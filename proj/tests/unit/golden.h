#pragma once

#include "hoikit/geometry/primitives.h"
#include "hoikit/render/raster.h"

namespace hoikit::test {

// Pixel buffer hash of golden_scene() under golden_camera(), frozen from
// the first run of this implementation.
inline constexpr const char* kGoldenHash = "e753149f1add7497e8b1796855cfec97aac9a4b16cd2e87163fadefec343a93a";

inline std::vector<render::ColoredMesh> golden_scene() {
  using geometry::Vec3;
  return {{geometry::make_icosphere(0.5, 2), Vec3(0.9, 0.3, 0.2)},
          {geometry::make_box(Vec3(0.2, -0.7, -0.3), Vec3(0.9, -0.1, 0.5)), Vec3(0.2, 0.5, 0.9)}};
}

inline render::Camera golden_camera() {
  render::Camera c;
  c.eye = geometry::Vec3(1.6, 1.1, 2.3);
  c.look_at = geometry::Vec3(0.1, -0.1, 0.0);
  c.width = 160;
  c.height = 120;
  return c;
}

}  // namespace hoikit::test
