#pragma once

#include "hoikit/hoiopt/optimizer.h"
#include "hoikit/refine/vlm.h"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace hoikit::cli {

using geometry::Vec3;

/// Bad or inconsistent run configuration. Reported before any work starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Everything one invocation needs. Relative paths in a config file are
/// resolved against the file's directory.
///
/// JSON keys (all optional except "object" and "hand"):
///   object, hand, out, hand_vertices, init {rotation, translation, scale,
///   pose}, weights {pene, hc, oc, repos, cons, theta_axis,
///   offsets_laplacian}, iterations, lr, optimize_offsets, fps_samples,
///   alpha_radius, image_size, contact_threshold, refine {eta, keep, batch,
///   selector, render}, vlm {base_url, model, api_key_env, timeout_s,
///   retries, backoff_s, description}, seed, params.
struct RunConfig {
  std::filesystem::path object;
  std::filesystem::path hand;
  std::filesystem::path out = "out";
  /// Upsample the hand template to this many vertices; 0 keeps it.
  std::size_t hand_vertices = 0;

  Vec3 init_rotation = Vec3::Zero();
  Vec3 init_translation = Vec3::Zero();
  double init_scale = hoiopt::kDefaultHandScale;
  /// Per-joint axis-angle; empty means the zero pose.
  std::vector<Vec3> init_pose;

  hoiopt::LossWeights weights;
  int iterations = 1000;
  double lr = 0.01;
  bool optimize_offsets = false;

  std::size_t fps_samples = geometry::kDefaultConciseSamples;
  double alpha_radius = geometry::kDefaultAlphaRadius;
  int image_size = 512;
  double contact_threshold = hoiopt::kDefaultContactThreshold;

  double eta = 0.01;
  std::size_t keep = 9;
  std::size_t batch = 3;
  std::string selector = "mock:penetration";
  bool render_candidates = true;
  refine::VlmConfig vlm;

  std::uint64_t seed = 0;
  /// Result JSON whose final parameters replace the initial ones (refine,
  /// render).
  std::optional<std::filesystem::path> params;

  /// Throws ConfigError naming the first offending field or path.
  void validate() const;
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
};

/// Command-line values that win over the file.
struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<int> iterations;
  std::optional<std::string> selector;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> params;
};

/// Reads and parses a config file, applies the overrides and validates.
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});
void apply(RunConfig& config, const Overrides& overrides);

nlohmann::json params_to_json(const hoiopt::HoiParams& params);
/// Reads the "params" object of a result file or a bare params object.
hoiopt::HoiParams params_from_json(const nlohmann::json& j, const hand::HandModel& model);

}  // namespace hoikit::cli
