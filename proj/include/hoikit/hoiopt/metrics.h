#pragma once

#include "hoikit/hoiopt/scene.h"

namespace hoikit::hoiopt {

inline constexpr double kDefaultContactThreshold = 0.005;

/// Penetration depth of a penetrating object vertex is its distance to the
/// nearest hand vertex; max and mean are 0 when nothing penetrates.
struct Metrics {
  double max_penetration = 0.0;
  double mean_penetration = 0.0;
  std::size_t penetrating = 0;
  double min_distance = 0.0;
  bool contact = false;
};

Metrics metrics(const HoiScene& scene, const HoiParams& params, double contact_threshold = kDefaultContactThreshold);

/// Fraction of scenes with contact; 0 for an empty batch.
double contact_ratio(std::span<const Metrics> batch);

}  // namespace hoikit::hoiopt
