#pragma once

#include "hoikit/geometry/alpha_shape.h"
#include "hoikit/geometry/mesh_ops.h"
#include "hoikit/geometry/primitives.h"
#include "hoikit/hand/hand_model.h"
#include "hoikit/hoiopt/scene.h"

#include <memory>

namespace hoikit::test {

/// Rigid single-joint "hand": a densely split slab x, y in [-0.1, 0.1],
/// z in [0, 0.1].
inline hand::HandModel slab_hand() {
  hand::HandModel m;
  m.mesh = geometry::upsample_to_target(geometry::make_box(geometry::Vec3(-0.1, -0.1, 0.0), geometry::Vec3(0.1, 0.1, 0.1)),
                                        6000)
               .mesh;
  m.weights = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(m.mesh.num_vertices()), 1);
  m.parents = {-1};
  m.joints_rest = {geometry::Vec3::Zero()};
  m.fingertips = {0};
  m.validate();
  return m;
}

/// Object points that the slab at translation zero penetrates from below
/// (a sheet 15 mm above the bottom face) and walls 5 mm outside each side
/// face. Among the 5x5x5 grid at eta 0.01 only offset (0, 0, +2) clears
/// everything: lifting by 2 cm clears the sheet and any sideways step hits
/// a wall.
inline hoiopt::HoiScene slab_scene() {
  hoiopt::HoiScene scene;
  using geometry::Vec3;
  for (int i = -5; i <= 5; ++i)
    for (int j = -5; j <= 5; ++j) scene.object_vertices.push_back(Vec3(0.01 * i, 0.01 * j, 0.015));
  for (int s : {-1, 1})
    for (int i = -5; i <= 5; ++i)
      for (double z : {0.035, 0.05, 0.065}) {
        scene.object_vertices.push_back(Vec3(s * 0.105, 0.01 * i, z));
        scene.object_vertices.push_back(Vec3(0.01 * i, s * 0.105, z));
      }
  scene.concise = geometry::make_concise(geometry::make_box(Vec3(-0.12, -0.12, 0.0), Vec3(0.12, 0.12, 0.1)));
  scene.hand = std::make_shared<hand::HandModel>(slab_hand());
  scene.init = hoiopt::HoiParams::rest(*scene.hand, 1.0);
  return scene;
}

/// Test hand with its palm bowl pressed 5 mm into a sphere of radius 0.05.
inline hoiopt::HoiScene sphere_scene(double radius = 0.05, int dense = 3, int concise = 2) {
  hoiopt::HoiScene scene;
  scene.object_vertices = geometry::make_icosphere(radius, dense).vertices;
  scene.concise = geometry::make_concise(geometry::make_icosphere(radius, concise));
  scene.hand = std::make_shared<hand::HandModel>(hand::make_test_hand());
  scene.init = hoiopt::HoiParams::rest(*scene.hand, 1.0);
  scene.init.translation = geometry::Vec3(-0.048, -radius - 0.004 + 0.005, 0.0);
  return scene;
}

}  // namespace hoikit::test
