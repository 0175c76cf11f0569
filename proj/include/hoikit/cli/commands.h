#pragma once

#include "hoikit/cli/config.h"
#include "hoikit/geometry/mesh_ops.h"
#include "hoikit/refine/refine.h"

#include <filesystem>
#include <iosfwd>
#include <span>

namespace hoikit::cli {

/// Loaded inputs for one run.
struct Workspace {
  geometry::TriMesh object;
  hoiopt::HoiScene scene;
  geometry::WatertightReport concise_report;
};

/// Loads the object and hand, builds the concise mesh (FPS + alpha shape)
/// and sets the initial parameters from the config, or from config.params
/// when given.
Workspace load_workspace(const RunConfig& config);

struct PrepareOutput {
  std::filesystem::path concise;
  std::filesystem::path gaussians;
  std::filesystem::path summary;
  bool watertight = false;
  long euler_characteristic = 0;
};

/// Writes concise.ply, object_gaussians.ply and prepare.json.
PrepareOutput cmd_prepare(const RunConfig& config);

struct OptimizeOutput {
  std::filesystem::path result;
  std::filesystem::path trace;
  std::filesystem::path before;
  std::filesystem::path after;
  hoiopt::OptimizeResult run;
};

/// Writes result.json, trace.csv, before.png and after.png. The result JSON
/// holds no timing or path data, so equal configs give equal bytes.
OptimizeOutput cmd_optimize(const RunConfig& config);

struct RefineOutput {
  std::filesystem::path result;
  std::filesystem::path transcript;
  std::filesystem::path render;
  std::vector<std::filesystem::path> candidates;
  refine::RefineResult run;
};

/// Writes refine.json, transcript.json, refined.png and, unless disabled,
/// candidates/candidate_<id>.png. A failed tournament still writes its
/// partial transcript before the error propagates.
RefineOutput cmd_refine(const RunConfig& config);

struct RenderOutput {
  std::filesystem::path image;
  std::string sha256;
};

/// Renders the initial (or config.params) state to render.png.
RenderOutput cmd_render(const RunConfig& config);

struct MetricsRow {
  std::string scene;
  hoiopt::Metrics metrics;
};

struct MetricsTable {
  std::vector<MetricsRow> rows;
  double contact_ratio = 0.0;
};

/// Reads the "final" metrics block of each result file (optimize or
/// refine output).
MetricsTable cmd_metrics(std::span<const std::filesystem::path> results);

/// Header: scene, max_penetration, mean_penetration, min_distance, contact.
/// One row per scene with contact as 0 or 1, then a row named "ALL" holding
/// the largest max, the mean of the means, the smallest distance and the
/// contact ratio.
void write_tsv(const MetricsTable& table, std::ostream& out);

nlohmann::json metrics_to_json(const hoiopt::Metrics& m);
hoiopt::Metrics metrics_from_json(const nlohmann::json& j);

}  // namespace hoikit::cli
