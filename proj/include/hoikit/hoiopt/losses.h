#pragma once

#include "hoikit/geometry/knn.h"
#include "hoikit/hoiopt/scene.h"

#include <optional>

namespace hoikit::hoiopt {

/// Composed hand plus the correspondences every loss term reads. Building
/// one fixes all nearest-neighbour assignments; gradients treat them as
/// constants.
struct Evaluation {
  ComposedHand hand;
  geometry::KnnIndex hand_index;
  /// Nearest hand vertex for each dense object vertex.
  std::vector<geometry::Neighbor> object_to_hand;
  std::vector<PenetrationPair> penetration;
};

Evaluation evaluate(const HoiContext& context, const HoiParams& params);

/// A loss value and its gradient in ParamLayout order. `active` counts the
/// terms that entered the sum (pairs, masked points or selected joints).
struct LossValue {
  double value = 0.0;
  Eigen::VectorXd gradient;
  std::size_t active = 0;
};

/// Sum of squared distances over the current penetrating pairs.
LossValue loss_pene(const HoiContext& context, const Evaluation& eval, const ParamLayout& layout);
/// Masked object vertices to their nearest hand vertices.
LossValue loss_oc(const HoiContext& context, const Evaluation& eval, const ContactMasks& masks,
                  const ParamLayout& layout);
/// Masked keypoints to their nearest concise-mesh vertices.
LossValue loss_hc(const HoiContext& context, const Evaluation& eval, const ContactMasks& masks,
                  const ParamLayout& layout);
/// Keypoints inside the concise mesh or marked in C_h, to their nearest
/// concise-mesh vertices.
LossValue loss_repos(const HoiContext& context, const Evaluation& eval, const ContactMasks& masks,
                     const ParamLayout& layout);
/// |t - t0|^2 + |r - r0|^2 + sum over joints of |a * (theta_j - theta0_j)|^2
/// with a the per-axis factors.
LossValue loss_cons(const HoiParams& params, const HoiParams& init, const Vec3& theta_axis, const ParamLayout& layout);
/// Laplacian position term on template + offsets against the template.
LossValue loss_offsets(const HoiParams& params, const hand::HandModel& model, const gaussmap::LaplacianStencil& stencil,
                       double weight, const ParamLayout& layout);

struct TotalLoss {
  double value = 0.0;
  /// Unweighted terms.
  double pene = 0.0, hc = 0.0, oc = 0.0, repos = 0.0, cons = 0.0, offsets = 0.0;
  std::size_t n_pene = 0;
  std::size_t n_repos = 0;
  Eigen::VectorXd gradient;
};

/// Weighted sum of all terms. The hand is composed and backpropagated once.
TotalLoss total_loss(const HoiContext& context, const HoiParams& params, const ContactMasks& masks,
                     const LossWeights& weights, const ParamLayout& layout);

}  // namespace hoikit::hoiopt
