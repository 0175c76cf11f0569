#pragma once

#include "hoikit/hoiopt/scene.h"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace hoikit::refine {

using geometry::Vec3;

inline constexpr double kDefaultEta = 0.01;
inline constexpr int kGridRadius = 2;
inline constexpr std::size_t kGridSize = 125;
inline constexpr std::size_t kDefaultKeep = 9;

/// t_c = base + eta * o_c for o_c in {-2..2}^3, enumerated with the x offset
/// varying slowest: id = 25 (ox + 2) + 5 (oy + 2) + (oz + 2).
struct CandidateSet {
  Vec3 base = Vec3::Zero();
  double eta = kDefaultEta;
  std::vector<std::array<int, 3>> offsets;
  std::vector<Vec3> translations;

  std::size_t size() const { return translations.size(); }
  /// Id of the zero offset.
  static constexpr std::size_t base_id() { return 62; }
};

CandidateSet candidate_grid(const Vec3& base, double eta = kDefaultEta);

/// Optional semantic score per candidate; higher is better.
using Scorer = std::function<double(std::size_t id, const Vec3& translation)>;

struct RankedCandidate {
  std::size_t id = 0;
  double penetration = 0.0;
  double score = 0.0;
};

/// Combined score = -(L - min L) / (max L - min L) + semantic, with the
/// normalized term 0 when all L are equal. Returns the `keep` best, higher
/// score first and ties by lower index. Throws InvalidArgument when keep
/// exceeds the number of candidates.
std::vector<RankedCandidate> rank_candidates(std::span<const double> penetration, std::span<const double> semantic,
                                             std::size_t keep);

/// Penetration loss (sum of squared penetrating distances) with the hand
/// translation replaced by each candidate.
std::vector<double> candidate_penetration(const CandidateSet& candidates, const hoiopt::HoiScene& scene,
                                          const hoiopt::HoiParams& params);

std::vector<RankedCandidate> prefilter(const CandidateSet& candidates, const hoiopt::HoiScene& scene,
                                       const hoiopt::HoiParams& params, const Scorer& scorer = {},
                                       std::size_t keep = kDefaultKeep);

}  // namespace hoikit::refine
