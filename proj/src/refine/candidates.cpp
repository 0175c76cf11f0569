#include "hoikit/refine/candidates.h"

#include "hoikit/error.h"
#include "hoikit/hoiopt/losses.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hoikit::refine {

CandidateSet candidate_grid(const Vec3& base, double eta) {
  if (!base.allFinite() || !std::isfinite(eta) || eta <= 0.0)
    throw InvalidArgument("candidate grid needs a finite base and a positive eta");
  CandidateSet set;
  set.base = base;
  set.eta = eta;
  for (int x = -kGridRadius; x <= kGridRadius; ++x)
    for (int y = -kGridRadius; y <= kGridRadius; ++y)
      for (int z = -kGridRadius; z <= kGridRadius; ++z) {
        set.offsets.push_back({x, y, z});
        set.translations.push_back(base + eta * Vec3(x, y, z));
      }
  return set;
}

std::vector<RankedCandidate> rank_candidates(std::span<const double> penetration, std::span<const double> semantic,
                                             std::size_t keep) {
  const std::size_t n = penetration.size();
  if (!semantic.empty() && semantic.size() != n) throw InvalidArgument("prefilter: score count mismatch");
  if (keep > n) throw InvalidArgument("prefilter: keep = " + std::to_string(keep) + " exceeds " + std::to_string(n));
  std::vector<RankedCandidate> all(n);
  if (n == 0) return all;
  const auto [lo, hi] = std::minmax_element(penetration.begin(), penetration.end());
  const double range = *hi - *lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = range > 0.0 ? (penetration[i] - *lo) / range : 0.0;
    all[i] = {i, penetration[i], -norm + (semantic.empty() ? 0.0 : semantic[i])};
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) { return a.score > b.score; });
  all.resize(keep);
  return all;
}

std::vector<double> candidate_penetration(const CandidateSet& candidates, const hoiopt::HoiScene& scene,
                                          const hoiopt::HoiParams& params) {
  const hoiopt::HoiContext context(scene);
  const auto layout = hoiopt::ParamLayout::of(*scene.hand, false);
  std::vector<double> out;
  out.reserve(candidates.size());
  hoiopt::HoiParams p = params;
  for (const Vec3& t : candidates.translations) {
    p.translation = t;
    out.push_back(hoiopt::loss_pene(context, hoiopt::evaluate(context, p), layout).value);
  }
  return out;
}

std::vector<RankedCandidate> prefilter(const CandidateSet& candidates, const hoiopt::HoiScene& scene,
                                       const hoiopt::HoiParams& params, const Scorer& scorer, std::size_t keep) {
  if (keep > candidates.size())
    throw InvalidArgument("prefilter: keep = " + std::to_string(keep) + " exceeds " +
                          std::to_string(candidates.size()));
  const auto pene = candidate_penetration(candidates, scene, params);
  std::vector<double> semantic;
  if (scorer) {
    semantic.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) semantic.push_back(scorer(i, candidates.translations[i]));
  }
  return rank_candidates(pene, semantic, keep);
}

}  // namespace hoikit::refine
