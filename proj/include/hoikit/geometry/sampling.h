#pragma once

#include "hoikit/geometry/types.h"

namespace hoikit::geometry {

/// Greedy farthest point sampling. Starts at `start`; each following pick
/// maximizes the distance to the already selected set, ties going to the
/// lowest index. Throws InvalidArgument if n exceeds the point count.
std::vector<std::uint32_t> farthest_point_sample(const PointCloud& points, std::size_t n,
                                                 std::size_t start = 0);

}  // namespace hoikit::geometry
