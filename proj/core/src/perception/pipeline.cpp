#include "tabletop/perception/pipeline.hpp"

#include <nlohmann/json.hpp>

#include "tabletop/common/errors.hpp"
#include "tabletop/world/scene_io.hpp"

namespace tabletop::perception {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json camera_json(const CameraModel& cam) {
  ordered_json j;
  j["id"] = cam.id;
  j["width"] = cam.width;
  j["height"] = cam.height;
  j["fx"] = cam.fx;
  j["fy"] = cam.fy;
  j["cx"] = cam.cx;
  j["cy"] = cam.cy;
  ordered_json ext = ordered_json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) ext.push_back(cam.extrinsics.matrix()(r, c));
  j["extrinsics"] = ext;
  return j;
}

CameraModel camera_from_json(const ordered_json& j, const std::string& where) {
  auto need = [&](const char* key) -> const ordered_json& {
    auto it = j.find(key);
    if (it == j.end())
      throw Error(ErrorCode::ParseError, where + ": missing field '" + key + "'");
    return *it;
  };
  CameraModel cam;
  cam.id = need("id").get<std::string>();
  cam.width = need("width").get<int>();
  cam.height = need("height").get<int>();
  if (cam.width <= 0 || cam.height <= 0)
    throw Error(ErrorCode::ValidationError, where + ": image size must be positive");
  cam.fx = need("fx").get<double>();
  cam.fy = need("fy").get<double>();
  cam.cx = need("cx").get<double>();
  cam.cy = need("cy").get<double>();
  const auto& ext = need("extrinsics");
  if (!ext.is_array() || ext.size() != 16)
    throw Error(ErrorCode::ParseError, where + ": extrinsics must be 16 numbers");
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = ext[r * 4 + c].get<double>();
  cam.extrinsics.matrix() = m;
  return cam;
}

}  // namespace

PerceptionConfig load_rig_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid rig JSON: ") + e.what());
  }
  PerceptionConfig cfg;
  if (!j.contains("cameras") || !j["cameras"].is_array() || j["cameras"].empty())
    throw Error(ErrorCode::ValidationError, "rig config needs a nonempty cameras array");
  for (size_t i = 0; i < j["cameras"].size(); ++i)
    cfg.cameras.push_back(camera_from_json(j["cameras"][i], "cameras[" + std::to_string(i) + "]"));

  if (j.contains("noise")) cfg.noise.depth_sigma = j["noise"].value("depth_sigma", 0.0);
  if (j.contains("detector")) {
    const auto& d = j["detector"];
    cfg.detector.conf_threshold = d.value("conf_threshold", cfg.detector.conf_threshold);
    cfg.detector.base_logit = d.value("base_logit", cfg.detector.base_logit);
    cfg.detector.miss_rate = d.value("miss_rate", cfg.detector.miss_rate);
    cfg.detector.confusion_rate = d.value("confusion_rate", cfg.detector.confusion_rate);
    if (d.contains("confusions")) {
      cfg.detector.confusions.clear();
      for (const auto& pair : d["confusions"]) {
        if (!pair.is_array() || pair.size() != 2)
          throw Error(ErrorCode::ParseError, "detector.confusions entries must be [a, b] pairs");
        cfg.detector.confusions.emplace_back(pair[0].get<std::string>(),
                                             pair[1].get<std::string>());
      }
    }
  }
  if (j.contains("fusion")) cfg.fusion.assoc_dist = j["fusion"].value("assoc_dist", 0.05);
  if (j.contains("denoise")) {
    cfg.denoise.k = j["denoise"].value("k", 16);
    cfg.denoise.sigma_mult = j["denoise"].value("sigma_mult", 2.0);
    if (cfg.denoise.k < 1)
      throw Error(ErrorCode::ValidationError, "denoise.k must be at least 1");
  }
  return cfg;
}

PerceptionConfig load_rig_file(const std::filesystem::path& path) {
  return load_rig_text(world::load_text_file(path));
}

std::string serialize_rig(const PerceptionConfig& config) {
  ordered_json j;
  ordered_json cams = ordered_json::array();
  for (const auto& c : config.cameras) cams.push_back(camera_json(c));
  j["cameras"] = cams;
  j["noise"] = {{"depth_sigma", config.noise.depth_sigma}};
  ordered_json det;
  det["conf_threshold"] = config.detector.conf_threshold;
  det["base_logit"] = config.detector.base_logit;
  det["miss_rate"] = config.detector.miss_rate;
  det["confusion_rate"] = config.detector.confusion_rate;
  ordered_json confusions = ordered_json::array();
  for (const auto& [a, b] : config.detector.confusions)
    confusions.push_back(ordered_json::array({a, b}));
  det["confusions"] = confusions;
  j["detector"] = det;
  j["fusion"] = {{"assoc_dist", config.fusion.assoc_dist}};
  j["denoise"] = {{"k", config.denoise.k}, {"sigma_mult", config.denoise.sigma_mult}};
  return j.dump(2) + "\n";
}

const std::vector<RenderedView>& Pipeline::views(const world::WorldState& state, Rng& rng) {
  if (!cache_ || cache_->revision != state.revision) {
    Rng render_rng = rng.fork("render-" + std::to_string(state.revision));
    cache_ = Cache{state.revision, render_views(state, config_.cameras, config_.noise, render_rng)};
  }
  return cache_->views;
}

std::vector<FusedObject> Pipeline::enumerate(const world::WorldState& state,
                                             std::string_view query, Rng& rng) {
  const auto& rendered = views(state, rng);
  Rng detect_rng =
      rng.fork("detect-" + std::to_string(state.revision) + "-" + std::string(query));
  std::vector<PartialCloud> clouds;
  for (const auto& view : rendered) {
    for (const auto& det : detect(view, state, query, config_.detector, detect_rng)) {
      try {
        clouds.push_back(deproject_detection(det, view.depth, view.camera));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyCloud) throw;
        // a mask without depth returns contributes nothing
      }
    }
  }
  return fuse_clouds(clouds, config_.fusion.assoc_dist);
}

FusedObject Pipeline::query_object(const world::WorldState& state, std::string_view query,
                                   Rng& rng) {
  std::vector<FusedObject> candidates = enumerate(state, query, rng);
  if (candidates.empty())
    throw Error(ErrorCode::VisionNotFound, "no detection for '" + std::string(query) + "'");
  FusedObject best = std::move(candidates.front());
  const DenoiseResult cleaned = denoise_cloud(best.points, config_.denoise);
  best.points = cleaned.points;
  std::tie(best.centroid, best.dims) = extract_geometry(best.points);
  return best;
}

}  // namespace tabletop::perception
