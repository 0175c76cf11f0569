#pragma once

#include "hoikit/hoiopt/scene.h"
#include "hoikit/render/raster.h"

namespace hoikit::render {

inline const Vec3 kHandColor(0.86, 0.66, 0.52);
inline const Vec3 kObjectColor(0.42, 0.58, 0.86);

/// Object (concise surface) as mesh 0, composed hand as mesh 1.
std::vector<ColoredMesh> hoi_meshes(const hoiopt::HoiScene& scene, const hoiopt::HoiParams& params);

/// Camera framing the object and the hand at `params`.
Camera hoi_camera(const hoiopt::HoiScene& scene, const hoiopt::HoiParams& params, int width = kDefaultImageSize,
                  int height = kDefaultImageSize);

Image render_hoi(const hoiopt::HoiScene& scene, const hoiopt::HoiParams& params, const Camera& camera);

}  // namespace hoikit::render
