#include "hoikit/hoiopt/optimizer.h"

#include <cmath>
#include <sstream>

namespace hoikit::hoiopt {

AdamState AdamState::zeros(std::size_t size, double lr) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size));
  s.v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size));
  s.lr = lr;
  return s;
}

HoiParams adam_step(AdamState& state, const HoiParams& params, const Eigen::VectorXd& gradient,
                    const ParamLayout& layout) {
  const auto n = static_cast<Eigen::Index>(layout.size());
  if (gradient.size() != n || state.m.size() != n || state.v.size() != n)
    throw InvalidArgument("adam: gradient and moment sizes must match the parameter layout");
  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * gradient;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * gradient.cwiseProduct(gradient);
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  Eigen::VectorXd x = layout.pack(params);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    x[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
  HoiParams out = params;
  layout.unpack(x, out);
  out.pose = hand::clamp_pose(out.pose);
  return out;
}

namespace {

std::string snapshot(int iteration, const TotalLoss& loss, const HoiParams& params) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "non-finite loss at iteration " << iteration << ": pene=" << loss.pene << " hc=" << loss.hc
      << " oc=" << loss.oc << " repos=" << loss.repos << " cons=" << loss.cons << " offsets=" << loss.offsets
      << "; r=(" << params.rotation.transpose() << ") t=(" << params.translation.transpose() << ")";
  return msg.str();
}

}  // namespace

OptimizeResult optimize(const HoiScene& scene, const OptimizeOptions& options) {
  options.weights.validate();
  if (options.iterations < 0) throw InvalidArgument("iterations must be non-negative");
  const HoiContext context(scene);
  const ParamLayout layout = ParamLayout::of(*scene.hand, options.optimize_offsets);

  OptimizeResult result;
  result.masks = init_contact_masks(context);
  result.params = scene.init;
  if (options.optimize_offsets && result.params.pose.offsets.empty())
    result.params.pose.offsets.assign(scene.hand->num_vertices(), Vec3::Zero());
  result.initial = metrics(scene, result.params, options.contact_threshold);

  AdamState adam = AdamState::zeros(layout.size(), options.lr);
  if (options.trace) result.trace.reserve(static_cast<std::size_t>(options.iterations));
  for (int it = 0; it < options.iterations; ++it) {
    const TotalLoss loss = total_loss(context, result.params, result.masks, options.weights, layout);
    if (!std::isfinite(loss.value) || !loss.gradient.allFinite())
      throw NonFiniteLossError(snapshot(it, loss, result.params));
    if (options.trace)
      result.trace.push_back({loss.value, loss.pene, loss.hc, loss.oc, loss.repos, loss.cons, loss.offsets,
                              loss.n_pene, loss.n_repos});
    result.params = adam_step(adam, result.params, loss.gradient, layout);
  }
  result.final = metrics(scene, result.params, options.contact_threshold);
  return result;
}

}  // namespace hoikit::hoiopt
