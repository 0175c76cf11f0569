#pragma once

#include "hoikit/hand/hand_model.h"
#include "hoikit/hand/rotation.h"

#include <span>

namespace hoikit::hand {

inline constexpr double kRootPoseLimit = 3.14;
inline constexpr double kArticulationPoseMin = -0.6;
inline constexpr double kArticulationPoseMax = 1.65;

/// theta row 0 is the global root rotation; offsets is either empty (zero)
/// or one per template vertex.
struct HandPose {
  std::vector<Vec3> theta;
  Vec3 root_translation = Vec3::Zero();
  std::vector<Vec3> offsets;

  static HandPose zero(const HandModel& model);
};

/// Componentwise clamp to the pose limits. Idempotent.
HandPose clamp_pose(const HandPose& pose);

struct LbsOutput {
  std::vector<Vec3> vertices;
  std::vector<Vec3> joints;
};

/// Forward pass plus everything the derivatives need.
struct LbsState : LbsOutput {
  std::vector<AxisAngleRotation> local;
  std::vector<Mat3> global_rotation;
  std::vector<Vec3> global_translation;  ///< excludes root_translation
  std::vector<Vec3> rest;                ///< T + B_P(theta) + offsets
  Vec3 root_translation = Vec3::Zero();

  /// World-frame rotation axis of d/dtheta(j, k).
  Vec3 axis(std::size_t joint, int k) const { return global_rotation[joint] * local[joint].body[k]; }
  /// Linear map from a rest-shape displacement of vertex v to its posed position.
  Mat3 blended_rotation(const HandModel& model, std::size_t v) const;
};

/// Throws InvalidArgument on a dimension mismatch.
LbsState lbs_evaluate(const HandModel& model, const HandPose& pose);
LbsOutput lbs_forward(const HandModel& model, const HandPose& pose);

/// Skeleton joints followed by fingertip vertices; 21 entries for MANO
/// layouts.
std::vector<Vec3> keypoints_21(const HandModel& model, std::span<const Vec3> vertices, std::span<const Vec3> joints);

/// Dense derivatives at a pose. Theta columns are ordered joint-major
/// (3j + k). Offsets only move their own vertex, so that Jacobian is stored
/// as one 3x3 block per vertex; a fingertip keypoint shares the block of its
/// vertex and joint keypoints do not depend on offsets.
struct LbsJacobians {
  Eigen::MatrixXd vertices_theta;        ///< 3V x 3J
  Eigen::MatrixXd vertices_translation;  ///< 3V x 3
  std::vector<Mat3> vertices_offset;     ///< V blocks
  Eigen::MatrixXd keypoints_theta;       ///< 3K x 3J
  Eigen::MatrixXd keypoints_translation; ///< 3K x 3
};

LbsJacobians lbs_jacobians(const HandModel& model, const HandPose& pose);

struct LbsGradient {
  std::vector<Vec3> theta;
  Vec3 translation = Vec3::Zero();
  std::vector<Vec3> offsets;
};

/// Vector-Jacobian product. Either gradient span may be empty; otherwise
/// sizes are V and K.
LbsGradient lbs_backward(const HandModel& model, const LbsState& state, std::span<const Vec3> grad_vertices,
                         std::span<const Vec3> grad_keypoints);

}  // namespace hoikit::hand
