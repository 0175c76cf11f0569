#include "hoikit/hand/lbs.h"

#include <algorithm>

namespace hoikit::hand {

HandPose HandPose::zero(const HandModel& model) {
  HandPose pose;
  pose.theta.assign(model.num_joints(), Vec3::Zero());
  return pose;
}

HandPose clamp_pose(const HandPose& pose) {
  HandPose out = pose;
  for (std::size_t j = 0; j < out.theta.size(); ++j) {
    const double lo = j == 0 ? -kRootPoseLimit : kArticulationPoseMin;
    const double hi = j == 0 ? kRootPoseLimit : kArticulationPoseMax;
    for (int k = 0; k < 3; ++k) out.theta[j][k] = std::clamp(out.theta[j][k], lo, hi);
  }
  return out;
}

namespace {

void check_dimensions(const HandModel& model, const HandPose& pose) {
  if (pose.theta.size() != model.num_joints())
    throw InvalidArgument("pose has " + std::to_string(pose.theta.size()) + " joint rotations, model has " +
                          std::to_string(model.num_joints()) + " joints");
  if (!pose.offsets.empty() && pose.offsets.size() != model.num_vertices())
    throw InvalidArgument("pose has " + std::to_string(pose.offsets.size()) + " offsets, model has " +
                          std::to_string(model.num_vertices()) + " vertices");
}

// Row-major entries of R - I for one joint.
Eigen::Matrix<double, 9, 1> flatten(const Mat3& m) {
  Eigen::Matrix<double, 9, 1> f;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) f[3 * a + b] = m(a, b);
  return f;
}

// is_ancestor[i][j]: joint i lies on the path from j to the root (inclusive).
std::vector<std::vector<char>> ancestor_table(const HandModel& model) {
  const std::size_t J = model.num_joints();
  std::vector<std::vector<char>> table(J, std::vector<char>(J, 0));
  for (std::size_t j = 0; j < J; ++j)
    for (int i = static_cast<int>(j); i != -1; i = model.parents[static_cast<std::size_t>(i)])
      table[static_cast<std::size_t>(i)][j] = 1;
  return table;
}

}  // namespace

Mat3 LbsState::blended_rotation(const HandModel& model, std::size_t v) const {
  Mat3 M = Mat3::Identity();
  for (std::size_t j = 0; j < global_rotation.size(); ++j) {
    const double w = model.weights(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(j));
    if (w != 0.0) M += w * (global_rotation[j] - Mat3::Identity());
  }
  return M;
}

LbsState lbs_evaluate(const HandModel& model, const HandPose& pose) {
  check_dimensions(model, pose);
  const std::size_t J = model.num_joints();
  const std::size_t V = model.num_vertices();
  LbsState s;
  s.root_translation = pose.root_translation;
  s.local.resize(J);
  s.global_rotation.resize(J);
  s.global_translation.resize(J);
  for (std::size_t j = 0; j < J; ++j) s.local[j] = rodrigues(pose.theta[j]);

  for (int jj : model.topological_order()) {
    const auto j = static_cast<std::size_t>(jj);
    const Mat3& R = s.local[j].R;
    const Vec3 t = (Mat3::Identity() - R) * model.joints_rest[j];
    if (model.parents[j] < 0) {
      s.global_rotation[j] = R;
      s.global_translation[j] = t;
    } else {
      const auto p = static_cast<std::size_t>(model.parents[j]);
      s.global_rotation[j] = s.global_rotation[p] * R;
      s.global_translation[j] = s.global_rotation[p] * t + s.global_translation[p];
    }
  }
  s.joints.resize(J);
  for (std::size_t j = 0; j < J; ++j)
    s.joints[j] = s.global_rotation[j] * model.joints_rest[j] + s.global_translation[j] + pose.root_translation;

  s.rest = model.mesh.vertices;
  if (!pose.offsets.empty())
    for (std::size_t v = 0; v < V; ++v) s.rest[v] += pose.offsets[v];
  if (model.pose_blend.size() != 0) {
    Eigen::VectorXd features(9 * (J - 1));
    for (std::size_t j = 1; j < J; ++j)
      features.segment<9>(static_cast<Eigen::Index>(9 * (j - 1))) = flatten(s.local[j].R - Mat3::Identity());
    const Eigen::VectorXd disp = model.pose_blend.transpose() * features;
    for (std::size_t v = 0; v < V; ++v) s.rest[v] += disp.segment<3>(static_cast<Eigen::Index>(3 * v));
  }

  // Written as r + sum_j w_j (G_j r - r) so that identity transforms
  // reproduce the rest shape bit-exactly.
  s.vertices.resize(V);
  for (std::size_t v = 0; v < V; ++v) {
    Vec3 x = Vec3::Zero();
    for (std::size_t j = 0; j < J; ++j) {
      const double w = model.weights(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(j));
      if (w != 0.0) x += w * ((s.global_rotation[j] - Mat3::Identity()) * s.rest[v] + s.global_translation[j]);
    }
    s.vertices[v] = s.rest[v] + x + pose.root_translation;
  }
  return s;
}

LbsOutput lbs_forward(const HandModel& model, const HandPose& pose) {
  LbsState s = lbs_evaluate(model, pose);
  return {std::move(s.vertices), std::move(s.joints)};
}

std::vector<Vec3> keypoints_21(const HandModel& model, std::span<const Vec3> vertices, std::span<const Vec3> joints) {
  if (joints.size() != model.num_joints() || vertices.size() != model.num_vertices())
    throw InvalidArgument("keypoints: vertex or joint count does not match the model");
  std::vector<Vec3> out(joints.begin(), joints.end());
  for (auto id : model.fingertips) out.push_back(vertices[id]);
  return out;
}

LbsJacobians lbs_jacobians(const HandModel& model, const HandPose& pose) {
  const LbsState s = lbs_evaluate(model, pose);
  const std::size_t J = model.num_joints();
  const std::size_t V = model.num_vertices();
  const std::size_t K = model.num_keypoints();
  const auto ancestor = ancestor_table(model);

  LbsJacobians jac;
  jac.vertices_theta = Eigen::MatrixXd::Zero(3 * V, 3 * J);
  jac.vertices_translation = Eigen::MatrixXd::Zero(3 * V, 3);
  jac.vertices_offset.resize(V);
  for (std::size_t v = 0; v < V; ++v) {
    jac.vertices_translation.block<3, 3>(3 * v, 0).setIdentity();
    jac.vertices_offset[v] = s.blended_rotation(model, v);
  }

  for (std::size_t i = 0; i < J; ++i) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 a = s.axis(i, k);
      const auto col = static_cast<Eigen::Index>(3 * i + k);
      Eigen::VectorXd blend;
      if (model.pose_blend.size() != 0 && i > 0)
        blend = model.pose_blend.middleRows(static_cast<Eigen::Index>(9 * (i - 1)), 9).transpose() * flatten(s.local[i].dR[k]);
      for (std::size_t v = 0; v < V; ++v) {
        Vec3 lever = Vec3::Zero();
        for (std::size_t j = 0; j < J; ++j) {
          const double w = model.weights(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(j));
          if (w == 0.0 || !ancestor[i][j]) continue;
          const Vec3 z = s.global_rotation[j] * s.rest[v] + s.global_translation[j] + s.root_translation;
          lever += w * (z - s.joints[i]);
        }
        Vec3 d = a.cross(lever);
        if (blend.size() != 0) d += jac.vertices_offset[v] * blend.segment<3>(static_cast<Eigen::Index>(3 * v));
        jac.vertices_theta.block<3, 1>(static_cast<Eigen::Index>(3 * v), col) = d;
      }
    }
  }

  jac.keypoints_theta = Eigen::MatrixXd::Zero(3 * K, 3 * J);
  jac.keypoints_translation = Eigen::MatrixXd::Zero(3 * K, 3);
  for (std::size_t j = 0; j < J; ++j) {
    jac.keypoints_translation.block<3, 3>(3 * j, 0).setIdentity();
    for (int i = model.parents[j]; i != -1; i = model.parents[static_cast<std::size_t>(i)]) {
      const auto ii = static_cast<std::size_t>(i);
      for (int k = 0; k < 3; ++k)
        jac.keypoints_theta.block<3, 1>(static_cast<Eigen::Index>(3 * j), static_cast<Eigen::Index>(3 * ii + k)) =
            s.axis(ii, k).cross(s.joints[j] - s.joints[ii]);
    }
  }
  for (std::size_t t = 0; t < model.fingertips.size(); ++t) {
    const std::size_t row = 3 * (J + t);
    const std::size_t v = model.fingertips[t];
    jac.keypoints_theta.middleRows(static_cast<Eigen::Index>(row), 3) = jac.vertices_theta.middleRows(static_cast<Eigen::Index>(3 * v), 3);
    jac.keypoints_translation.block<3, 3>(static_cast<Eigen::Index>(row), 0).setIdentity();
  }
  return jac;
}

LbsGradient lbs_backward(const HandModel& model, const LbsState& s, std::span<const Vec3> grad_vertices,
                         std::span<const Vec3> grad_keypoints) {
  const std::size_t J = model.num_joints();
  const std::size_t V = model.num_vertices();
  if (!grad_vertices.empty() && grad_vertices.size() != V) throw InvalidArgument("vertex gradient size mismatch");
  if (!grad_keypoints.empty() && grad_keypoints.size() != model.num_keypoints())
    throw InvalidArgument("keypoint gradient size mismatch");

  std::vector<Vec3> g(V, Vec3::Zero());
  if (!grad_vertices.empty()) std::copy(grad_vertices.begin(), grad_vertices.end(), g.begin());
  if (!grad_keypoints.empty())
    for (std::size_t t = 0; t < model.fingertips.size(); ++t) g[model.fingertips[t]] += grad_keypoints[J + t];

  LbsGradient out;
  out.theta.assign(J, Vec3::Zero());
  out.offsets.assign(V, Vec3::Zero());
  std::vector<Vec3> moment(J, Vec3::Zero());
  const bool has_blend = model.pose_blend.size() != 0;
  Eigen::VectorXd h_all;
  if (has_blend) h_all = Eigen::VectorXd::Zero(3 * V);

  for (std::size_t v = 0; v < V; ++v) {
    const Vec3& gv = g[v];
    if (gv.isZero(0.0)) continue;
    out.translation += gv;
    Mat3 M = Mat3::Identity();
    for (std::size_t j = 0; j < J; ++j) {
      const double w = model.weights(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(j));
      if (w == 0.0) continue;
      M += w * (s.global_rotation[j] - Mat3::Identity());
      const Vec3 z = s.global_rotation[j] * s.rest[v] + s.global_translation[j] + s.root_translation;
      for (int i = static_cast<int>(j); i != -1; i = model.parents[static_cast<std::size_t>(i)])
        moment[static_cast<std::size_t>(i)] += w * (z - s.joints[static_cast<std::size_t>(i)]).cross(gv);
    }
    const Vec3 h = M.transpose() * gv;
    out.offsets[v] = h;
    if (has_blend) h_all.segment<3>(static_cast<Eigen::Index>(3 * v)) = h;
  }

  if (!grad_keypoints.empty()) {
    for (std::size_t j = 0; j < J; ++j) {
      const Vec3& gj = grad_keypoints[j];
      if (gj.isZero(0.0)) continue;
      out.translation += gj;
      for (int i = model.parents[j]; i != -1; i = model.parents[static_cast<std::size_t>(i)])
        moment[static_cast<std::size_t>(i)] += (s.joints[j] - s.joints[static_cast<std::size_t>(i)]).cross(gj);
    }
  }

  for (std::size_t i = 0; i < J; ++i)
    for (int k = 0; k < 3; ++k) out.theta[i][k] = s.axis(i, k).dot(moment[i]);

  if (has_blend) {
    const Eigen::VectorXd q = model.pose_blend * h_all;
    for (std::size_t i = 1; i < J; ++i)
      for (int k = 0; k < 3; ++k)
        out.theta[i][k] += flatten(s.local[i].dR[k]).dot(q.segment<9>(static_cast<Eigen::Index>(9 * (i - 1))));
  }
  return out;
}

}  // namespace hoikit::hand
