#include "hoikit/hoiopt/losses.h"

namespace hoikit::hoiopt {

Evaluation evaluate(const HoiContext& context, const HoiParams& params) {
  Evaluation eval;
  eval.hand = compose_hand(params, context.hand());
  eval.hand_index = geometry::KnnIndex(eval.hand.vertices);
  const auto& objects = context.scene().object_vertices;
  eval.object_to_hand = geometry::nearest_on_set(eval.hand_index, objects);
  for (std::size_t o = 0; o < objects.size(); ++o) {
    const auto h = eval.object_to_hand[o].index;
    if (eval.hand.normals[h].dot(eval.hand.vertices[h] - objects[o]) > 0.0)
      eval.penetration.push_back({static_cast<std::uint32_t>(o), h});
  }
  return eval;
}

namespace {

// World-space gradients on hand vertices and keypoints.
struct WorldGradient {
  std::vector<Vec3> vertices;
  std::vector<Vec3> keypoints;

  explicit WorldGradient(const Evaluation& eval)
      : vertices(eval.hand.vertices.size(), Vec3::Zero()), keypoints(eval.hand.keypoints.size(), Vec3::Zero()) {}

  void add(const WorldGradient& other, double w) {
    for (std::size_t i = 0; i < vertices.size(); ++i) vertices[i] += w * other.vertices[i];
    for (std::size_t i = 0; i < keypoints.size(); ++i) keypoints[i] += w * other.keypoints[i];
  }
};

// Chain rule through world = s R x + t and then through LBS.
Eigen::VectorXd backprop(const HoiContext& context, const Evaluation& eval, const WorldGradient& g,
                         const ParamLayout& layout) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.size()));
  const ComposedHand& h = eval.hand;
  const Mat3 sRt = h.scale * h.rotation.R.transpose();
  const auto& model = context.hand();
  const auto lbs_keypoints = hand::keypoints_21(model, h.lbs.vertices, h.lbs.joints);

  Vec3 gt = Vec3::Zero();
  Vec3 gr = Vec3::Zero();
  std::vector<Vec3> gx(g.vertices.size(), Vec3::Zero());
  std::vector<Vec3> gk(g.keypoints.size(), Vec3::Zero());
  auto accumulate = [&](const Vec3& gw, const Vec3& x) {
    gt += gw;
    for (int k = 0; k < 3; ++k) gr[k] += h.scale * gw.dot(h.rotation.dR[k] * x);
  };
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (g.vertices[v].isZero(0.0)) continue;
    accumulate(g.vertices[v], h.lbs.vertices[v]);
    gx[v] = sRt * g.vertices[v];
  }
  for (std::size_t k = 0; k < g.keypoints.size(); ++k) {
    if (g.keypoints[k].isZero(0.0)) continue;
    accumulate(g.keypoints[k], lbs_keypoints[k]);
    gk[k] = sRt * g.keypoints[k];
  }
  const auto lbs_grad = hand::lbs_backward(model, h.lbs, gx, gk);
  grad.segment<3>(0) = gr;
  grad.segment<3>(3) = gt;
  for (std::size_t j = 0; j < layout.joints; ++j)
    grad.segment<3>(static_cast<Eigen::Index>(layout.theta_begin() + 3 * j)) = lbs_grad.theta[j];
  if (layout.offsets)
    for (std::size_t v = 0; v < layout.vertices; ++v)
      grad.segment<3>(static_cast<Eigen::Index>(layout.offsets_begin() + 3 * v)) = lbs_grad.offsets[v];
  return grad;
}

double pene_term(const HoiContext& context, const Evaluation& eval, WorldGradient& g, std::size_t& active) {
  const auto& objects = context.scene().object_vertices;
  double value = 0.0;
  for (const auto& pair : eval.penetration) {
    const Vec3 d = eval.hand.vertices[pair.hand] - objects[pair.object];
    value += d.squaredNorm();
    g.vertices[pair.hand] += 2.0 * d;
  }
  active = eval.penetration.size();
  return value;
}

double oc_term(const HoiContext& context, const Evaluation& eval, const ContactMasks& masks, WorldGradient& g,
               std::size_t& active) {
  const auto& objects = context.scene().object_vertices;
  if (masks.object.size() != objects.size()) throw InvalidArgument("object mask size does not match the scene");
  double value = 0.0;
  active = 0;
  for (std::size_t o = 0; o < objects.size(); ++o) {
    if (!masks.object[o]) continue;
    const auto h = eval.object_to_hand[o].index;
    const Vec3 d = eval.hand.vertices[h] - objects[o];
    value += d.squaredNorm();
    g.vertices[h] += 2.0 * d;
    ++active;
  }
  return value;
}

double keypoint_term(const HoiContext& context, const Evaluation& eval, const std::vector<std::uint8_t>& selected,
                     WorldGradient& g, std::size_t& active) {
  const auto& concise = context.concise().mesh().mesh.vertices;
  double value = 0.0;
  active = 0;
  for (std::size_t k = 0; k < selected.size(); ++k) {
    if (!selected[k]) continue;
    const Vec3& p = eval.hand.keypoints[k];
    const Vec3 d = p - concise[context.concise().nearest(p).index];
    value += d.squaredNorm();
    g.keypoints[k] += 2.0 * d;
    ++active;
  }
  return value;
}

void check_keypoint_mask(const Evaluation& eval, const ContactMasks& masks) {
  if (masks.keypoints.size() != eval.hand.keypoints.size())
    throw InvalidArgument("keypoint mask size does not match the hand");
}

double hc_term(const HoiContext& context, const Evaluation& eval, const ContactMasks& masks, WorldGradient& g,
               std::size_t& active) {
  check_keypoint_mask(eval, masks);
  return keypoint_term(context, eval, masks.keypoints, g, active);
}

double repos_term(const HoiContext& context, const Evaluation& eval, const ContactMasks& masks, WorldGradient& g,
                  std::size_t& active) {
  check_keypoint_mask(eval, masks);
  std::vector<std::uint8_t> selected(masks.keypoints);
  for (std::size_t k = 0; k < selected.size(); ++k)
    if (!selected[k] && context.concise().is_inside(eval.hand.keypoints[k])) selected[k] = 1;
  return keypoint_term(context, eval, selected, g, active);
}

LossValue finish(const HoiContext& context, const Evaluation& eval, const ParamLayout& layout, double value,
                 const WorldGradient& g, std::size_t active) {
  LossValue out;
  out.value = value;
  out.active = active;
  out.gradient = backprop(context, eval, g, layout);
  return out;
}

}  // namespace

LossValue loss_pene(const HoiContext& context, const Evaluation& eval, const ParamLayout& layout) {
  WorldGradient g(eval);
  std::size_t active = 0;
  const double value = pene_term(context, eval, g, active);
  return finish(context, eval, layout, value, g, active);
}

LossValue loss_oc(const HoiContext& context, const Evaluation& eval, const ContactMasks& masks,
                  const ParamLayout& layout) {
  WorldGradient g(eval);
  std::size_t active = 0;
  const double value = oc_term(context, eval, masks, g, active);
  return finish(context, eval, layout, value, g, active);
}

LossValue loss_hc(const HoiContext& context, const Evaluation& eval, const ContactMasks& masks,
                  const ParamLayout& layout) {
  WorldGradient g(eval);
  std::size_t active = 0;
  const double value = hc_term(context, eval, masks, g, active);
  return finish(context, eval, layout, value, g, active);
}

LossValue loss_repos(const HoiContext& context, const Evaluation& eval, const ContactMasks& masks,
                     const ParamLayout& layout) {
  WorldGradient g(eval);
  std::size_t active = 0;
  const double value = repos_term(context, eval, masks, g, active);
  return finish(context, eval, layout, value, g, active);
}

LossValue loss_cons(const HoiParams& params, const HoiParams& init, const Vec3& theta_axis, const ParamLayout& layout) {
  if (params.pose.theta.size() != init.pose.theta.size()) throw InvalidArgument("consistency: pose sizes differ");
  LossValue out;
  out.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.size()));
  const Vec3 dt = params.translation - init.translation;
  const Vec3 dr = params.rotation - init.rotation;
  out.value = dt.squaredNorm() + dr.squaredNorm();
  out.gradient.segment<3>(0) = 2.0 * dr;
  out.gradient.segment<3>(3) = 2.0 * dt;
  const Vec3 a2 = theta_axis.cwiseProduct(theta_axis);
  for (std::size_t j = 0; j < params.pose.theta.size(); ++j) {
    const Vec3 d = params.pose.theta[j] - init.pose.theta[j];
    out.value += a2.dot(d.cwiseProduct(d));
    out.gradient.segment<3>(static_cast<Eigen::Index>(layout.theta_begin() + 3 * j)) = 2.0 * a2.cwiseProduct(d);
  }
  out.active = params.pose.theta.size();
  return out;
}

LossValue loss_offsets(const HoiParams& params, const hand::HandModel& model, const gaussmap::LaplacianStencil& stencil,
                       double weight, const ParamLayout& layout) {
  LossValue out;
  out.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.size()));
  if (!layout.offsets || params.pose.offsets.empty()) return out;
  const std::size_t V = model.num_vertices();
  gaussmap::Matrix ref = gaussmap::to_matrix(model.mesh.vertices);
  gaussmap::Matrix mu = ref;
  for (std::size_t v = 0; v < V; ++v) mu.row(static_cast<Eigen::Index>(v)) += params.pose.offsets[v].transpose();
  const gaussmap::Matrix zeros = gaussmap::Matrix::Zero(static_cast<Eigen::Index>(V), 3);
  const auto lap = gaussmap::laplacian_loss(mu, ref, zeros, zeros, {weight, 0.0, 0.0}, stencil);
  out.value = lap.value;
  for (std::size_t v = 0; v < V; ++v)
    out.gradient.segment<3>(static_cast<Eigen::Index>(layout.offsets_begin() + 3 * v)) =
        lap.grad_positions.row(static_cast<Eigen::Index>(v)).transpose();
  out.active = V;
  return out;
}

TotalLoss total_loss(const HoiContext& context, const HoiParams& params, const ContactMasks& masks,
                     const LossWeights& weights, const ParamLayout& layout) {
  const Evaluation eval = evaluate(context, params);
  TotalLoss out;
  WorldGradient total(eval);
  std::size_t active = 0;
  {
    WorldGradient g(eval);
    out.pene = pene_term(context, eval, g, out.n_pene);
    total.add(g, weights.pene);
  }
  {
    WorldGradient g(eval);
    out.oc = oc_term(context, eval, masks, g, active);
    total.add(g, weights.oc);
  }
  {
    WorldGradient g(eval);
    out.hc = hc_term(context, eval, masks, g, active);
    total.add(g, weights.hc);
  }
  {
    WorldGradient g(eval);
    out.repos = repos_term(context, eval, masks, g, out.n_repos);
    total.add(g, weights.repos);
  }
  out.gradient = backprop(context, eval, total, layout);

  const LossValue cons = loss_cons(params, context.scene().init, weights.theta_axis, layout);
  out.cons = cons.value;
  out.gradient += weights.cons * cons.gradient;
  if (layout.offsets) {
    // The Laplacian weight already scales this term.
    const LossValue off = loss_offsets(params, context.hand(), context.hand_stencil(), weights.offsets_laplacian, layout);
    out.offsets = off.value;
    out.gradient += off.gradient;
  }
  out.value = weights.pene * out.pene + weights.hc * out.hc + weights.oc * out.oc + weights.repos * out.repos +
              weights.cons * out.cons + out.offsets;
  return out;
}

}  // namespace hoikit::hoiopt
