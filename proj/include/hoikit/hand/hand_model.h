#pragma once

#include "hoikit/error.h"
#include "hoikit/geometry/types.h"

#include <Eigen/Core>

#include <filesystem>

namespace hoikit::hand {

using geometry::Vec3;

class HandModelError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kManoJoints = 16;
inline constexpr std::size_t kManoVertices = 778;
inline constexpr std::size_t kManoFingertips = 5;

/// Skinned hand template. `weights` is V x J with rows summing to one,
/// `parents[0] == -1` and every other joint has a parent, forming a tree
/// rooted at joint 0. `pose_blend` is either empty (no pose correctives) or
/// a 9(J-1) x 3V matrix applied to the row-major entries of R_j - I for the
/// non-root joints.
struct HandModel {
  geometry::TriMesh mesh;
  Eigen::MatrixXd weights;
  std::vector<int> parents;
  std::vector<Vec3> joints_rest;
  /// Fingertip vertex ids in thumb to pinky order.
  std::vector<std::uint32_t> fingertips;
  Eigen::MatrixXd pose_blend;

  std::size_t num_vertices() const { return mesh.vertices.size(); }
  std::size_t num_joints() const { return parents.size(); }
  std::size_t num_keypoints() const { return parents.size() + fingertips.size(); }

  /// Joints ordered so that parents come before children.
  std::vector<int> topological_order() const;

  /// Throws HandModelError on any schema or invariant violation.
  void validate() const;
};

/// Dense copy of the hand for Gaussian binding: the template is refined by
/// longest-edge midpoint splits until it has `target` vertices. Skinning
/// weights and pose-blend columns of a new vertex are interpolated from its
/// parent edge. Original vertex ids, joints and fingertip ids are kept.
HandModel upsample_hand(const HandModel& model, std::size_t target);

/// JSON schema:
///   { "vertices": [[x,y,z],...], "faces": [[i,j,k],...],
///     "weights": V x J nested rows (or a flat row-major array),
///     "parents": [-1, ...], "joints_rest": [[x,y,z],...],
///     "fingertips": [ids], "pose_blend": optional 9(J-1) x 3V }
HandModel load_hand_model(const std::filesystem::path& path);
void save_hand_model(const HandModel& model, const std::filesystem::path& path);

/// Layout of a generated hand. Joint order follows the MANO convention
/// (root, index, middle, pinky, ring, thumb) restricted to the fingers
/// requested.
struct ProceduralHandOptions {
  int fingers = 5;            ///< 2..5; thumb plus index, middle, ring, pinky in that priority
  int segments = 3;           ///< joints per finger
  int rings_per_segment = 4;  ///< tube rings along each bone
  int ring_vertices = 8;      ///< vertices around each ring
  int palm_latitudes = 15;    ///< palm ellipsoid bands (pole to pole)
  int palm_longitudes = 19;
  /// Radius of the spherical hollow in the palm side (0 for a plain
  /// ellipsoid palm).
  double palm_cup_radius = 0.06;
};

/// Builds a closed, blend-skinned hand mesh in meters. The defaults give the
/// MANO layout: 16 joints and 778 vertices. Palm normal points to
/// +y, fingers extend along +x and positive rotation about z curls a finger
/// toward the palm side.
HandModel make_procedural_hand(const ProceduralHandOptions& options = {});

/// 3 fingers with 2 joints each: J = 7, V = 600.
HandModel make_test_hand();

}  // namespace hoikit::hand
