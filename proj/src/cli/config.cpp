#include "hoikit/cli/config.h"

#include <cmath>
#include <fstream>
#include <set>

namespace hoikit::cli {

namespace fs = std::filesystem;

namespace {

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number())
    throw ConfigError(field + ": expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

std::vector<Vec3> vecs_from(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field + ": expected a list of [x, y, z]");
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec_from(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + key + ": wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (object.empty()) throw ConfigError("object: path missing");
  if (hand.empty()) throw ConfigError("hand: path missing");
  if (!fs::is_regular_file(object)) throw ConfigError("object: no such file: " + object.string());
  if (!fs::is_regular_file(hand)) throw ConfigError("hand: no such file: " + hand.string());
  if (params && !fs::is_regular_file(*params)) throw ConfigError("params: no such file: " + params->string());
  if (out.empty()) throw ConfigError("out: path missing");
  if (!init_rotation.allFinite() || !init_translation.allFinite()) throw ConfigError("init: non-finite value");
  if (!(init_scale > 0.0) || !std::isfinite(init_scale)) throw ConfigError("init.scale: must be positive");
  for (const Vec3& t : init_pose)
    if (!t.allFinite()) throw ConfigError("init.pose: non-finite value");
  try {
    weights.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("weights: ") + e.what());
  }
  if (iterations < 0) throw ConfigError("iterations: must be >= 0");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr: must be positive");
  if (fps_samples < 4) throw ConfigError("fps_samples: must be >= 4");
  if (!(alpha_radius > 0.0) || !std::isfinite(alpha_radius)) throw ConfigError("alpha_radius: must be positive");
  if (image_size < 1 || image_size > 8192) throw ConfigError("image_size: must be in [1, 8192]");
  if (!(contact_threshold > 0.0) || !std::isfinite(contact_threshold))
    throw ConfigError("contact_threshold: must be positive");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("refine.eta: must be positive");
  if (keep < 1 || keep > 125) throw ConfigError("refine.keep: must be in [1, 125]");
  if (batch < 2) throw ConfigError("refine.batch: must be >= 2");
  if (selector != "vlm" && selector != "mock:penetration" && selector != "mock:closest" && selector != "mock:first")
    throw ConfigError("selector: unknown \"" + selector + "\" (vlm, mock:penetration, mock:closest, mock:first)");
  if (vlm.retries < 0) throw ConfigError("vlm.retries: must be >= 0");
  if (!(vlm.timeout_s > 0.0)) throw ConfigError("vlm.timeout_s: must be positive");
  if (!(vlm.backoff_s >= 0.0)) throw ConfigError("vlm.backoff_s: must be >= 0");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json pose = nlohmann::json::array();
  for (const Vec3& t : init_pose) pose.push_back(vec_json(t));
  nlohmann::json j{
      {"object", object.generic_string()},
      {"hand", hand.generic_string()},
      {"out", out.generic_string()},
      {"hand_vertices", hand_vertices},
      {"init",
       {{"rotation", vec_json(init_rotation)},
        {"translation", vec_json(init_translation)},
        {"scale", init_scale},
        {"pose", pose}}},
      {"weights",
       {{"pene", weights.pene},
        {"hc", weights.hc},
        {"oc", weights.oc},
        {"repos", weights.repos},
        {"cons", weights.cons},
        {"theta_axis", vec_json(weights.theta_axis)},
        {"offsets_laplacian", weights.offsets_laplacian}}},
      {"iterations", iterations},
      {"lr", lr},
      {"optimize_offsets", optimize_offsets},
      {"fps_samples", fps_samples},
      {"alpha_radius", alpha_radius},
      {"image_size", image_size},
      {"contact_threshold", contact_threshold},
      {"refine", {{"eta", eta}, {"keep", keep}, {"batch", batch}, {"selector", selector}, {"render", render_candidates}}},
      {"vlm", vlm.to_json()},
      {"seed", seed},
  };
  if (params) j["params"] = params->generic_string();
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  check_keys(j,
             {"object", "hand", "out", "hand_vertices", "init", "weights", "iterations", "lr", "optimize_offsets",
              "fps_samples", "alpha_radius", "image_size", "contact_threshold", "refine", "vlm", "seed", "params"},
             "config");
  RunConfig c;
  std::string object, hand, out, params;
  read(j, "object", object, "");
  read(j, "hand", hand, "");
  read(j, "out", out, "");
  read(j, "params", params, "");
  c.object = resolve(object, base_dir);
  c.hand = resolve(hand, base_dir);
  if (!out.empty()) c.out = resolve(out, base_dir);
  if (!params.empty()) c.params = resolve(params, base_dir);
  read(j, "hand_vertices", c.hand_vertices, "");
  if (j.contains("init")) {
    const auto& init = j["init"];
    check_keys(init, {"rotation", "translation", "scale", "pose"}, "init");
    if (init.contains("rotation")) c.init_rotation = vec_from(init["rotation"], "init.rotation");
    if (init.contains("translation")) c.init_translation = vec_from(init["translation"], "init.translation");
    read(init, "scale", c.init_scale, "init.");
    if (init.contains("pose")) c.init_pose = vecs_from(init["pose"], "init.pose");
  }
  if (j.contains("weights")) {
    const auto& w = j["weights"];
    check_keys(w, {"pene", "hc", "oc", "repos", "cons", "theta_axis", "offsets_laplacian"}, "weights");
    read(w, "pene", c.weights.pene, "weights.");
    read(w, "hc", c.weights.hc, "weights.");
    read(w, "oc", c.weights.oc, "weights.");
    read(w, "repos", c.weights.repos, "weights.");
    read(w, "cons", c.weights.cons, "weights.");
    read(w, "offsets_laplacian", c.weights.offsets_laplacian, "weights.");
    if (w.contains("theta_axis")) c.weights.theta_axis = vec_from(w["theta_axis"], "weights.theta_axis");
  }
  read(j, "iterations", c.iterations, "");
  read(j, "lr", c.lr, "");
  read(j, "optimize_offsets", c.optimize_offsets, "");
  read(j, "fps_samples", c.fps_samples, "");
  read(j, "alpha_radius", c.alpha_radius, "");
  read(j, "image_size", c.image_size, "");
  read(j, "contact_threshold", c.contact_threshold, "");
  if (j.contains("refine")) {
    const auto& r = j["refine"];
    check_keys(r, {"eta", "keep", "batch", "selector", "render"}, "refine");
    read(r, "eta", c.eta, "refine.");
    read(r, "keep", c.keep, "refine.");
    read(r, "batch", c.batch, "refine.");
    read(r, "selector", c.selector, "refine.");
    read(r, "render", c.render_candidates, "refine.");
  }
  if (j.contains("vlm")) {
    check_keys(j["vlm"], {"base_url", "model", "api_key_env", "timeout_s", "retries", "backoff_s", "description"},
               "vlm");
    try {
      c.vlm = refine::VlmConfig::from_json(j["vlm"]);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("vlm: wrong type");
    }
  }
  read(j, "seed", c.seed, "");
  return c;
}

void apply(RunConfig& config, const Overrides& o) {
  if (o.out) config.out = *o.out;
  if (o.iterations) config.iterations = *o.iterations;
  if (o.selector) config.selector = *o.selector;
  if (o.seed) config.seed = *o.seed;
  if (o.params) config.params = *o.params;
}

RunConfig load_config(const fs::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + path.string());
  RunConfig c = RunConfig::from_json(j, path.parent_path());
  apply(c, overrides);
  c.validate();
  return c;
}

nlohmann::json params_to_json(const hoiopt::HoiParams& params) {
  nlohmann::json theta = nlohmann::json::array();
  for (const Vec3& t : params.pose.theta) theta.push_back(vec_json(t));
  nlohmann::json j{{"rotation", vec_json(params.rotation)},
                   {"translation", vec_json(params.translation)},
                   {"scale", params.scale},
                   {"theta", theta},
                   {"root_translation", vec_json(params.pose.root_translation)}};
  if (!params.pose.offsets.empty()) {
    nlohmann::json offsets = nlohmann::json::array();
    for (const Vec3& d : params.pose.offsets) offsets.push_back(vec_json(d));
    j["offsets"] = offsets;
  }
  return j;
}

hoiopt::HoiParams params_from_json(const nlohmann::json& j, const hand::HandModel& model) {
  const auto& p = j.contains("params") ? j["params"] : j;
  if (!p.is_object() || !p.contains("translation")) throw ConfigError("params: expected a params object");
  hoiopt::HoiParams out = hoiopt::HoiParams::rest(model);
  if (p.contains("rotation")) out.rotation = vec_from(p["rotation"], "params.rotation");
  out.translation = vec_from(p["translation"], "params.translation");
  if (p.contains("scale")) out.scale = p["scale"].get<double>();
  if (p.contains("theta")) out.pose.theta = vecs_from(p["theta"], "params.theta");
  if (p.contains("root_translation"))
    out.pose.root_translation = vec_from(p["root_translation"], "params.root_translation");
  if (p.contains("offsets")) out.pose.offsets = vecs_from(p["offsets"], "params.offsets");
  if (out.pose.theta.size() != model.num_joints())
    throw ConfigError("params.theta: " + std::to_string(out.pose.theta.size()) + " joints, hand has " +
                      std::to_string(model.num_joints()));
  if (!out.pose.offsets.empty() && out.pose.offsets.size() != model.num_vertices())
    throw ConfigError("params.offsets: size does not match the hand");
  return out;
}

}  // namespace hoikit::cli
