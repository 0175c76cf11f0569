#pragma once

#include "hoikit/hand/lbs.h"

#include <Eigen/Core>

#include <cstdint>

namespace hoikit::hoiopt {

using geometry::Mat3;
using geometry::Vec3;

inline constexpr double kDefaultHandScale = 7.39;

/// Hand-relative object transform plus hand articulation. The composed hand
/// is s * R(rotation) * x + translation for every LBS output point x.
/// pose.root_translation takes part in LBS but is never optimized.
struct HoiParams {
  Vec3 rotation = Vec3::Zero();
  Vec3 translation = Vec3::Zero();
  hand::HandPose pose;
  double scale = kDefaultHandScale;

  static HoiParams rest(const hand::HandModel& model, double scale = kDefaultHandScale);
};

/// Flat parameter vector layout: r (3), t (3), theta (3J), then offsets (3V)
/// when enabled.
struct ParamLayout {
  std::size_t joints = 0;
  std::size_t vertices = 0;
  bool offsets = false;

  static ParamLayout of(const hand::HandModel& model, bool offsets);

  std::size_t size() const { return 6 + 3 * joints + (offsets ? 3 * vertices : 0); }
  std::size_t theta_begin() const { return 6; }
  std::size_t offsets_begin() const { return 6 + 3 * joints; }

  Eigen::VectorXd pack(const HoiParams& params) const;
  /// Overwrites the packed fields of `params`; the scale and root
  /// translation are left untouched.
  void unpack(const Eigen::VectorXd& x, HoiParams& params) const;
};

/// Frozen contact selections: C_o per dense object vertex and C_h per hand
/// keypoint. Entries are 0 or 1.
struct ContactMasks {
  std::vector<std::uint8_t> object;
  std::vector<std::uint8_t> keypoints;
  bool frozen = false;

  std::vector<std::uint32_t> object_indices() const;
  std::vector<std::uint32_t> keypoint_indices() const;
};

inline constexpr std::size_t kContactKeypoints = 5;
inline constexpr std::size_t kFallbackContactVertices = 5;

struct LossWeights {
  double pene = 10.0;
  double hc = 0.5;
  double oc = 0.5;
  double repos = 1.0;
  double cons = 1.0;
  /// Per-axis factors inside the pose consistency term (x, y, z).
  Vec3 theta_axis = Vec3(10.0, 10.0, 1.0);
  /// Laplacian position weight on the hand offsets; only used when offsets
  /// are optimized.
  double offsets_laplacian = 1.0e5;

  void validate() const;
};

}  // namespace hoikit::hoiopt
