#include "hoikit/hoiopt/metrics.h"

#include "hoikit/hoiopt/losses.h"

#include <algorithm>
#include <limits>

namespace hoikit::hoiopt {

Metrics metrics(const HoiScene& scene, const HoiParams& params, double contact_threshold) {
  const HoiContext context(scene);
  const Evaluation eval = evaluate(context, params);
  Metrics m;
  double sum = 0.0;
  for (const auto& pair : eval.penetration) {
    const double depth = eval.object_to_hand[pair.object].distance;
    m.max_penetration = std::max(m.max_penetration, depth);
    sum += depth;
  }
  m.penetrating = eval.penetration.size();
  if (m.penetrating > 0) m.mean_penetration = sum / static_cast<double>(m.penetrating);
  m.min_distance = std::numeric_limits<double>::infinity();
  for (const auto& n : eval.object_to_hand) m.min_distance = std::min(m.min_distance, n.distance);
  m.contact = m.min_distance < contact_threshold;
  return m;
}

double contact_ratio(std::span<const Metrics> batch) {
  if (batch.empty()) return 0.0;
  const auto hits = std::count_if(batch.begin(), batch.end(), [](const Metrics& m) { return m.contact; });
  return static_cast<double>(hits) / static_cast<double>(batch.size());
}

}  // namespace hoikit::hoiopt
