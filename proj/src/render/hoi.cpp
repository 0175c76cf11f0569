#include "hoikit/render/hoi.h"

#include <limits>

namespace hoikit::render {

std::vector<ColoredMesh> hoi_meshes(const hoiopt::HoiScene& scene, const hoiopt::HoiParams& params) {
  std::vector<ColoredMesh> out(2);
  out[0] = {scene.concise.mesh, kObjectColor};
  const auto hand = hoiopt::compose_hand(params, *scene.hand);
  out[1] = {geometry::TriMesh{hand.vertices, scene.hand->mesh.faces}, kHandColor};
  return out;
}

Camera hoi_camera(const hoiopt::HoiScene& scene, const hoiopt::HoiParams& params, int width, int height) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& m : hoi_meshes(scene, params))
    for (const Vec3& v : m.mesh.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  return default_hoi_camera(lo, hi, width, height);
}

Image render_hoi(const hoiopt::HoiScene& scene, const hoiopt::HoiParams& params, const Camera& camera) {
  return rasterize(hoi_meshes(scene, params), camera);
}

}  // namespace hoikit::render
