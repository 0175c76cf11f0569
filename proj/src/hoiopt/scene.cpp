#include "hoikit/hoiopt/scene.h"

#include "hoikit/geometry/mesh_ops.h"
#include "hoikit/hoiopt/losses.h"

#include <algorithm>

namespace hoikit::hoiopt {

void HoiScene::validate() const {
  if (object_vertices.empty()) throw InvalidArgument("scene has no object vertices");
  if (concise.mesh.vertices.empty()) throw InvalidArgument("scene has no concise object mesh");
  if (!hand) throw InvalidArgument("scene has no hand model");
  if (init.pose.theta.size() != hand->num_joints()) throw InvalidArgument("initial pose does not match the hand model");
  if (!(init.scale > 0.0)) throw InvalidArgument("hand scale must be positive");
}

ComposedHand compose_hand(const HoiParams& params, const hand::HandModel& model) {
  ComposedHand out;
  out.lbs = hand::lbs_evaluate(model, params.pose);
  out.rotation = hand::rodrigues(params.rotation);
  out.scale = params.scale;
  const Mat3 sR = params.scale * out.rotation.R;
  out.vertices.reserve(out.lbs.vertices.size());
  for (const Vec3& x : out.lbs.vertices) out.vertices.push_back(sR * x + params.translation);
  for (const Vec3& k : hand::keypoints_21(model, out.lbs.vertices, out.lbs.joints))
    out.keypoints.push_back(sR * k + params.translation);
  // Normals of the world mesh equal R * (posed normals) for s > 0.
  geometry::TriMesh world{out.vertices, model.mesh.faces};
  out.normals = geometry::vertex_normals(world).normals;
  return out;
}

std::vector<PenetrationPair> detect_penetration(const geometry::KnnIndex& hand_index,
                                                std::span<const Vec3> hand_normals,
                                                std::span<const Vec3> object_vertices) {
  std::vector<PenetrationPair> out;
  const auto& hv = hand_index.points();
  for (std::size_t o = 0; o < object_vertices.size(); ++o) {
    const auto near = hand_index.nearest(object_vertices[o]);
    if (hand_normals[near.index].dot(hv[near.index] - object_vertices[o]) > 0.0)
      out.push_back({static_cast<std::uint32_t>(o), near.index});
  }
  return out;
}

std::vector<PenetrationPair> detect_penetration(std::span<const Vec3> hand_vertices, std::span<const Vec3> hand_normals,
                                                std::span<const Vec3> object_vertices) {
  if (hand_vertices.size() != hand_normals.size()) throw InvalidArgument("hand vertex and normal counts differ");
  if (hand_vertices.empty()) return {};
  const geometry::KnnIndex index(std::vector<Vec3>(hand_vertices.begin(), hand_vertices.end()));
  return detect_penetration(index, hand_normals, object_vertices);
}

HoiContext::HoiContext(const HoiScene& scene)
    : scene_(&scene),
      object_index_((scene.validate(), scene.object_vertices)),
      concise_(scene.concise),
      hand_stencil_(gaussmap::build_stencil(scene.hand->mesh.vertices)) {}

namespace {

// Indices of the `count` smallest values, ties by index.
std::vector<std::uint32_t> smallest(const std::vector<double>& values, std::size_t count) {
  std::vector<std::uint32_t> idx(values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
  count = std::min(count, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(),
                    [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b] || (values[a] == values[b] && a < b); });
  idx.resize(count);
  return idx;
}

}  // namespace

ContactMasks init_contact_masks(const HoiContext& context) {
  const HoiScene& scene = context.scene();
  const Evaluation eval = evaluate(context, scene.init);
  ContactMasks masks;
  masks.object.assign(scene.object_vertices.size(), 0);
  masks.keypoints.assign(eval.hand.keypoints.size(), 0);
  if (!eval.penetration.empty()) {
    for (const auto& pair : eval.penetration) masks.object[pair.object] = 1;
  } else {
    std::vector<double> d(eval.object_to_hand.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = eval.object_to_hand[i].distance;
    for (auto i : smallest(d, kFallbackContactVertices)) masks.object[i] = 1;
  }
  std::vector<double> kd;
  kd.reserve(eval.hand.keypoints.size());
  for (const Vec3& k : eval.hand.keypoints) kd.push_back(context.object_index().nearest(k).distance);
  for (auto i : smallest(kd, kContactKeypoints)) masks.keypoints[i] = 1;
  masks.frozen = true;
  return masks;
}

}  // namespace hoikit::hoiopt
