#pragma once

#include "hoikit/hoiopt/losses.h"
#include "hoikit/hoiopt/metrics.h"

namespace hoikit::hoiopt {

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState zeros(std::size_t size, double lr = 0.01);
};

/// One Adam update of the packed parameters followed by the pose clamp.
HoiParams adam_step(AdamState& state, const HoiParams& params, const Eigen::VectorXd& gradient,
                    const ParamLayout& layout);

class NonFiniteLossError : public Error {
 public:
  using Error::Error;
};

struct OptimizeOptions {
  int iterations = 1000;
  LossWeights weights;
  double lr = 0.01;
  bool optimize_offsets = false;
  bool trace = true;
  double contact_threshold = kDefaultContactThreshold;
};

struct TraceEntry {
  double total = 0.0;
  double pene = 0.0, hc = 0.0, oc = 0.0, repos = 0.0, cons = 0.0, offsets = 0.0;
  std::size_t n_pene = 0;
  std::size_t n_repos = 0;
};

struct OptimizeResult {
  HoiParams params;
  ContactMasks masks;
  std::vector<TraceEntry> trace;
  Metrics initial;
  Metrics final;
};

/// Masks are initialized once from scene.init, then each iteration
/// recomputes correspondences, evaluates total_loss and takes an Adam step.
/// Throws NonFiniteLossError (with the iteration and term values) if the
/// loss stops being finite.
OptimizeResult optimize(const HoiScene& scene, const OptimizeOptions& options = {});

}  // namespace hoikit::hoiopt
