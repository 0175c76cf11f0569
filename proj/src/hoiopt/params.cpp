#include "hoikit/hoiopt/params.h"

#include <cmath>

namespace hoikit::hoiopt {

HoiParams HoiParams::rest(const hand::HandModel& model, double scale) {
  HoiParams p;
  p.pose = hand::HandPose::zero(model);
  p.scale = scale;
  return p;
}

ParamLayout ParamLayout::of(const hand::HandModel& model, bool offsets) {
  return {model.num_joints(), model.num_vertices(), offsets};
}

Eigen::VectorXd ParamLayout::pack(const HoiParams& params) const {
  if (params.pose.theta.size() != joints) throw InvalidArgument("pack: pose has the wrong joint count");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  x.segment<3>(0) = params.rotation;
  x.segment<3>(3) = params.translation;
  for (std::size_t j = 0; j < joints; ++j) x.segment<3>(static_cast<Eigen::Index>(6 + 3 * j)) = params.pose.theta[j];
  if (offsets && !params.pose.offsets.empty()) {
    if (params.pose.offsets.size() != vertices) throw InvalidArgument("pack: offsets have the wrong vertex count");
    for (std::size_t v = 0; v < vertices; ++v)
      x.segment<3>(static_cast<Eigen::Index>(offsets_begin() + 3 * v)) = params.pose.offsets[v];
  }
  return x;
}

void ParamLayout::unpack(const Eigen::VectorXd& x, HoiParams& params) const {
  if (static_cast<std::size_t>(x.size()) != size()) throw InvalidArgument("unpack: vector has the wrong size");
  params.rotation = x.segment<3>(0);
  params.translation = x.segment<3>(3);
  params.pose.theta.resize(joints);
  for (std::size_t j = 0; j < joints; ++j) params.pose.theta[j] = x.segment<3>(static_cast<Eigen::Index>(6 + 3 * j));
  if (offsets) {
    params.pose.offsets.resize(vertices);
    for (std::size_t v = 0; v < vertices; ++v)
      params.pose.offsets[v] = x.segment<3>(static_cast<Eigen::Index>(offsets_begin() + 3 * v));
  }
}

std::vector<std::uint32_t> ContactMasks::object_indices() const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < object.size(); ++i)
    if (object[i]) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

std::vector<std::uint32_t> ContactMasks::keypoint_indices() const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < keypoints.size(); ++i)
    if (keypoints[i]) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

void LossWeights::validate() const {
  for (double w : {pene, hc, oc, repos, cons, offsets_laplacian, theta_axis.x(), theta_axis.y(), theta_axis.z()})
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("loss weights must be finite and non-negative");
}

}  // namespace hoikit::hoiopt
