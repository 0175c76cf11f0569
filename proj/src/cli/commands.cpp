#include "hoikit/cli/commands.h"

#include "hoikit/gaussmap/gaussians.h"
#include "hoikit/geometry/mesh_io.h"
#include "hoikit/geometry/mesh_ops.h"
#include "hoikit/hand/hand_model.h"
#include "hoikit/refine/selectors.h"
#include "hoikit/render/hoi.h"
#include "hoikit/render/png.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

namespace hoikit::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw IoError("cannot write " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError(path.string() + ": not valid JSON");
  return j;
}

// The config echo in results leaves out the output directory so that two
// runs into different directories still compare equal.
nlohmann::json config_echo(const RunConfig& config) {
  auto j = config.to_json();
  j.erase("out");
  return j;
}

hoiopt::HoiParams initial_params(const RunConfig& config, const hand::HandModel& model) {
  if (config.params) return params_from_json(read_json(*config.params), model);
  hoiopt::HoiParams p = hoiopt::HoiParams::rest(model, config.init_scale);
  p.rotation = config.init_rotation;
  p.translation = config.init_translation;
  if (!config.init_pose.empty()) {
    if (config.init_pose.size() != model.num_joints())
      throw ConfigError("init.pose: " + std::to_string(config.init_pose.size()) + " joints, hand has " +
                        std::to_string(model.num_joints()));
    p.pose.theta = config.init_pose;
  }
  return p;
}

}  // namespace

nlohmann::json metrics_to_json(const hoiopt::Metrics& m) {
  return {{"max_penetration", m.max_penetration},
          {"mean_penetration", m.mean_penetration},
          {"penetrating", m.penetrating},
          {"min_distance", m.min_distance},
          {"contact", m.contact}};
}

hoiopt::Metrics metrics_from_json(const nlohmann::json& j) {
  hoiopt::Metrics m;
  try {
    m.max_penetration = j.at("max_penetration").get<double>();
    m.mean_penetration = j.at("mean_penetration").get<double>();
    m.penetrating = j.value("penetrating", std::size_t{0});
    m.min_distance = j.at("min_distance").get<double>();
    m.contact = j.at("contact").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("metrics block: ") + e.what());
  }
  return m;
}

Workspace load_workspace(const RunConfig& config) {
  Workspace ws;
  ws.object = geometry::load_mesh(config.object);
  if (ws.object.vertices.empty()) throw ConfigError("object: no vertices in " + config.object.string());
  auto model = hand::load_hand_model(config.hand);
  if (config.hand_vertices > model.num_vertices()) model = hand::upsample_hand(model, config.hand_vertices);
  ws.scene.object_vertices = ws.object.vertices;
  ws.scene.concise = geometry::build_concise_mesh(ws.object.vertices, config.fps_samples, config.alpha_radius);
  ws.concise_report = geometry::is_watertight(ws.scene.concise.mesh);
  ws.scene.init = initial_params(config, model);
  ws.scene.hand = std::make_shared<hand::HandModel>(std::move(model));
  ws.scene.validate();
  return ws;
}

PrepareOutput cmd_prepare(const RunConfig& config) {
  const Workspace ws = load_workspace(config);
  fs::create_directories(config.out);
  PrepareOutput out;
  out.concise = config.out / "concise.ply";
  out.gaussians = config.out / "object_gaussians.ply";
  out.summary = config.out / "prepare.json";
  out.watertight = ws.concise_report.watertight;
  out.euler_characteristic = ws.concise_report.euler_characteristic;

  geometry::save_mesh(ws.scene.concise.mesh, out.concise);
  const auto bound = gaussmap::bind_vertices(ws.object, gaussmap::kObjectMinOpacity);
  gaussmap::save_gaussians(bound.gaussians, out.gaussians);

  // Read back what was written.
  const auto concise = geometry::load_mesh(out.concise);
  if (concise.num_vertices() != ws.scene.concise.mesh.num_vertices() ||
      concise.num_faces() != ws.scene.concise.mesh.num_faces())
    throw IoError("concise mesh did not read back: " + out.concise.string());
  if (gaussmap::load_gaussians(out.gaussians, gaussmap::kObjectMinOpacity).size() != ws.object.num_vertices())
    throw IoError("gaussians did not read back: " + out.gaussians.string());
  if (!out.watertight) spdlog::warn("prepare: concise mesh is not watertight; try a larger alpha_radius");

  write_json(out.summary, {{"command", "prepare"},
                           {"seed", config.seed},
                           {"object_vertices", ws.object.num_vertices()},
                           {"fps_samples", config.fps_samples},
                           {"alpha_radius", config.alpha_radius},
                           {"concise_vertices", ws.scene.concise.mesh.num_vertices()},
                           {"concise_faces", ws.scene.concise.mesh.num_faces()},
                           {"watertight", out.watertight},
                           {"euler_characteristic", out.euler_characteristic},
                           {"gaussians", bound.gaussians.size()}});
  return out;
}

OptimizeOutput cmd_optimize(const RunConfig& config) {
  const Workspace ws = load_workspace(config);
  fs::create_directories(config.out);
  hoiopt::OptimizeOptions options;
  options.iterations = config.iterations;
  options.weights = config.weights;
  options.lr = config.lr;
  options.optimize_offsets = config.optimize_offsets;
  options.contact_threshold = config.contact_threshold;

  OptimizeOutput out;
  out.result = config.out / "result.json";
  out.trace = config.out / "trace.csv";
  out.before = config.out / "before.png";
  out.after = config.out / "after.png";
  out.run = hoiopt::optimize(ws.scene, options);
  const auto& run = out.run;

  nlohmann::json masks{{"object", run.masks.object_indices()}, {"keypoints", run.masks.keypoint_indices()}};
  write_json(out.result, {{"command", "optimize"},
                          {"seed", config.seed},
                          {"config", config_echo(config)},
                          {"iterations", config.iterations},
                          {"initial_params", params_to_json(ws.scene.init)},
                          {"params", params_to_json(run.params)},
                          {"masks", masks},
                          {"initial", metrics_to_json(run.initial)},
                          {"final", metrics_to_json(run.final)}});

  std::string csv = "iteration,total,pene,hc,oc,repos,cons,offsets,n_pene,n_repos\n";
  for (std::size_t i = 0; i < run.trace.size(); ++i) {
    const auto& t = run.trace[i];
    csv += std::to_string(i) + "," + num(t.total) + "," + num(t.pene) + "," + num(t.hc) + "," + num(t.oc) + "," +
           num(t.repos) + "," + num(t.cons) + "," + num(t.offsets) + "," + std::to_string(t.n_pene) + "," +
           std::to_string(t.n_repos) + "\n";
  }
  write_text(out.trace, csv);

  // Both renders share the camera framing the initial state.
  const auto camera = render::hoi_camera(ws.scene, ws.scene.init, config.image_size, config.image_size);
  render::write_png(render::render_hoi(ws.scene, ws.scene.init, camera), out.before);
  render::write_png(render::render_hoi(ws.scene, run.params, camera), out.after);
  spdlog::info("optimize: max penetration {:.6g} -> {:.6g}, contact {}", run.initial.max_penetration,
               run.final.max_penetration, run.final.contact);
  return out;
}

RefineOutput cmd_refine(const RunConfig& config) {
  // Selector construction comes first so a missing token fails before any
  // other work.
  std::unique_ptr<refine::Selector> selector;
  if (config.selector == "vlm") {
    try {
      selector = std::make_unique<refine::VlmSelector>(config.vlm);
    } catch (const refine::ConfigError& e) {
      throw ConfigError(e.what());
    }
  }
  const Workspace ws = load_workspace(config);
  const auto& base = ws.scene.init;
  if (!selector) selector = refine::make_mock_selector(config.selector, base.translation);
  fs::create_directories(config.out);

  RefineOutput out;
  out.result = config.out / "refine.json";
  out.transcript = config.out / "transcript.json";
  out.render = config.out / "refined.png";

  refine::RefineOptions options;
  options.eta = config.eta;
  options.keep = config.keep;
  options.batch = config.batch;
  options.image_size = config.image_size;
  options.render = config.render_candidates;
  try {
    out.run = refine::refine_translation(ws.scene, base, *selector, options);
  } catch (const refine::TournamentError& e) {
    write_json(out.transcript, refine::to_json(e.transcript));
    throw;
  }
  const auto& run = out.run;

  if (config.render_candidates) {
    fs::create_directories(config.out / "candidates");
    for (const auto& c : run.shown) {
      char name[32];
      std::snprintf(name, sizeof name, "candidate_%03zu.png", c.id);
      const fs::path path = config.out / "candidates" / name;
      write_text(path, std::string(c.png.begin(), c.png.end()));
      out.candidates.push_back(path);
    }
  }

  hoiopt::HoiParams refined = base;
  refined.translation = run.translation;
  const auto winner = run.tournament.winner;
  const auto& offset = run.candidates.offsets[winner];
  nlohmann::json survivors = nlohmann::json::array();
  for (const auto& s : run.survivors)
    survivors.push_back({{"id", s.id},
                         {"offset", run.candidates.offsets[s.id]},
                         {"translation", vec_json(run.candidates.translations[s.id])},
                         {"penetration", s.penetration},
                         {"score", s.score}});

  write_json(out.transcript, refine::to_json(run.tournament.transcript));
  write_json(out.result, {{"command", "refine"},
                          {"seed", config.seed},
                          {"config", config_echo(config)},
                          {"selector", selector->name()},
                          {"base_translation", vec_json(base.translation)},
                          {"winner", winner},
                          {"offset", offset},
                          {"translation", vec_json(run.translation)},
                          {"survivors", survivors},
                          {"params", params_to_json(refined)},
                          {"initial", metrics_to_json(hoiopt::metrics(ws.scene, base, config.contact_threshold))},
                          {"final", metrics_to_json(hoiopt::metrics(ws.scene, refined, config.contact_threshold))}});
  render::write_png(render::render_hoi(ws.scene, refined, run.camera), out.render);
  spdlog::info("refine: candidate {} offset ({}, {}, {})", winner, offset[0], offset[1], offset[2]);
  return out;
}

RenderOutput cmd_render(const RunConfig& config) {
  const Workspace ws = load_workspace(config);
  fs::create_directories(config.out);
  const auto camera = render::hoi_camera(ws.scene, ws.scene.init, config.image_size, config.image_size);
  const auto image = render::render_hoi(ws.scene, ws.scene.init, camera);
  RenderOutput out;
  out.image = config.out / "render.png";
  render::write_png(image, out.image);
  out.sha256 = render::image_sha256(image);
  return out;
}

MetricsTable cmd_metrics(std::span<const fs::path> results) {
  if (results.empty()) throw InvalidArgument("metrics: no result files given");
  MetricsTable table;
  std::vector<hoiopt::Metrics> all;
  for (const auto& path : results) {
    const auto j = read_json(path);
    if (!j.contains("final")) throw ParseError(path.string() + ": no \"final\" metrics block");
    table.rows.push_back({path.string(), metrics_from_json(j["final"])});
    all.push_back(table.rows.back().metrics);
  }
  table.contact_ratio = hoiopt::contact_ratio(all);
  return table;
}

void write_tsv(const MetricsTable& table, std::ostream& out) {
  out << "scene\tmax_penetration\tmean_penetration\tmin_distance\tcontact\n";
  double max = 0.0, mean = 0.0, dist = std::numeric_limits<double>::infinity();
  for (const auto& r : table.rows) {
    const auto& m = r.metrics;
    out << r.scene << '\t' << num(m.max_penetration) << '\t' << num(m.mean_penetration) << '\t'
        << num(m.min_distance) << '\t' << (m.contact ? 1 : 0) << '\n';
    max = std::max(max, m.max_penetration);
    mean += m.mean_penetration;
    dist = std::min(dist, m.min_distance);
  }
  if (!table.rows.empty()) mean /= static_cast<double>(table.rows.size());
  out << "ALL\t" << num(max) << '\t' << num(mean) << '\t' << num(table.rows.empty() ? 0.0 : dist) << '\t'
      << num(table.contact_ratio) << '\n';
}

}  // namespace hoikit::cli
