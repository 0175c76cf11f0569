#pragma once

#include "hoikit/refine/candidates.h"
#include "hoikit/refine/tournament.h"
#include "hoikit/render/raster.h"

namespace hoikit::refine {

struct RefineOptions {
  double eta = kDefaultEta;
  std::size_t keep = kDefaultKeep;
  std::size_t batch = kDefaultBatch;
  int image_size = render::kDefaultImageSize;
  /// Render survivors even when the selector does not need images.
  bool render = false;
  Scorer scorer;
};

struct RefineResult {
  Vec3 translation = Vec3::Zero();
  CandidateSet candidates;
  std::vector<double> penetration;
  std::vector<RankedCandidate> survivors;
  /// Survivors as shown to the selector, in prefilter order.
  std::vector<Candidate> shown;
  render::Camera camera;
  TournamentResult tournament;
};

/// Grid around params.translation, prefilter, render the survivors with one
/// camera framing the scene at params, then run the tournament. Only the
/// translation changes.
RefineResult refine_translation(const hoiopt::HoiScene& scene, const hoiopt::HoiParams& params, Selector& selector,
                                const RefineOptions& options = {});

}  // namespace hoikit::refine
