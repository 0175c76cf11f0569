#pragma once

#include "hoikit/gaussmap/laplacian.h"
#include "hoikit/geometry/alpha_shape.h"
#include "hoikit/hoiopt/params.h"

#include <memory>

namespace hoikit::hoiopt {

/// Dense object Gaussians (frozen), the concise object surface and the hand.
struct HoiScene {
  std::vector<Vec3> object_vertices;
  geometry::ConciseMesh concise;
  std::shared_ptr<const hand::HandModel> hand;
  HoiParams init;

  void validate() const;
};

/// World-space hand for one parameter setting, with the state needed for
/// backpropagation.
struct ComposedHand {
  std::vector<Vec3> vertices;
  std::vector<Vec3> keypoints;
  std::vector<Vec3> normals;
  hand::LbsState lbs;
  hand::AxisAngleRotation rotation;
  double scale = 1.0;
};

ComposedHand compose_hand(const HoiParams& params, const hand::HandModel& model);

struct PenetrationPair {
  std::uint32_t object = 0;
  std::uint32_t hand = 0;
};

/// Object vertex o penetrates iff dot(n_h, h - o) > 0 for its nearest hand
/// vertex h. Pairs are returned in object index order.
std::vector<PenetrationPair> detect_penetration(std::span<const Vec3> hand_vertices, std::span<const Vec3> hand_normals,
                                                std::span<const Vec3> object_vertices);

/// Same test with a prebuilt index over the hand vertices.
std::vector<PenetrationPair> detect_penetration(const geometry::KnnIndex& hand_index,
                                                std::span<const Vec3> hand_normals,
                                                std::span<const Vec3> object_vertices);

/// Search structures shared by every loss evaluation on a scene. Holds a
/// reference to the scene, which must outlive it.
class HoiContext {
 public:
  explicit HoiContext(const HoiScene& scene);

  const HoiScene& scene() const { return *scene_; }
  const hand::HandModel& hand() const { return *scene_->hand; }
  const geometry::KnnIndex& object_index() const { return object_index_; }
  const geometry::SurfaceQuery& concise() const { return concise_; }
  /// KNN Laplacian stencil over the hand template, for the offset term.
  const gaussmap::LaplacianStencil& hand_stencil() const { return hand_stencil_; }

 private:
  const HoiScene* scene_;
  geometry::KnnIndex object_index_;
  geometry::SurfaceQuery concise_;
  gaussmap::LaplacianStencil hand_stencil_;
};

/// C_o: the penetrating object vertices at the initial parameters, or the 5
/// object vertices closest to the hand when nothing penetrates. C_h: the 5
/// keypoints closest to the dense object vertices (all of them if there are
/// fewer). The result is frozen.
ContactMasks init_contact_masks(const HoiContext& context);

}  // namespace hoikit::hoiopt
