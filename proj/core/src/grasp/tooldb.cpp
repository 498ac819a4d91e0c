#include "tabletop/grasp/tooldb.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tabletop/common/errors.hpp"
#include "tabletop/perception/camera.hpp"
#include "tabletop/perception/render.hpp"
#include "tabletop/world/geometry.hpp"

namespace tabletop::grasp {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void ToolDatabase::insert(ToolModel model) {
  if (model.name.empty()) throw Error(ErrorCode::ValidationError, "tool model has no name");
  models_[model.name] = std::move(model);
}

const ToolModel* ToolDatabase::find(const std::string& name) const {
  auto it = models_.find(name);
  return it == models_.end() ? nullptr : &it->second;
}

std::vector<std::string> ToolDatabase::names() const {
  std::vector<std::string> out;
  out.reserve(models_.size());
  for (const auto& [name, model] : models_) out.push_back(name);
  return out;
}

ToolDatabase load_tool_db(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "tool db directory not found: " + dir.string());
  ToolDatabase db;
  std::vector<fs::path> entries;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) entries.push_back(entry.path());
  }
  std::sort(entries.begin(), entries.end());
  for (const auto& sub : entries) {
    const fs::path meta_path = sub / "meta.json";
    if (!fs::exists(meta_path)) continue;
    std::ifstream in(meta_path);
    ordered_json meta;
    try {
      meta = ordered_json::parse(in);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ParseError, "bad tool metadata " + meta_path.string() + ": " + e.what());
    }
    ToolModel model;
    if (!meta.contains("name") || !meta["name"].is_string()) {
      throw Error(ErrorCode::ValidationError, "tool metadata missing name: " + meta_path.string());
    }
    model.name = meta["name"].get<std::string>();
    if (!meta.contains("meters_per_pixel") || !meta["meters_per_pixel"].is_number()) {
      throw Error(ErrorCode::ValidationError, "tool metadata missing meters_per_pixel: " + meta_path.string());
    }
    model.meters_per_pixel = meta["meters_per_pixel"].get<double>();
    if (!(model.meters_per_pixel > 0.0)) {
      throw Error(ErrorCode::ValidationError, "tool metadata has nonpositive scale: " + meta_path.string());
    }
    model.full_mask = read_pgm(sub / "full.pgm");
    model.region_mask = read_pgm(sub / "region.pgm");
    if (model.region_mask.width() != model.full_mask.width() ||
        model.region_mask.height() != model.full_mask.height()) {
      throw Error(ErrorCode::ValidationError, "mask size mismatch for tool " + model.name);
    }
    db.insert(std::move(model));
  }
  return db;
}

void save_tool_db(const ToolDatabase& db, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& name : db.names()) {
    const ToolModel* model = db.find(name);
    const fs::path sub = dir / name;
    fs::create_directories(sub);
    write_pgm(model->full_mask, sub / "full.pgm");
    write_pgm(model->region_mask, sub / "region.pgm");
    ordered_json meta;
    meta["name"] = model->name;
    meta["meters_per_pixel"] = model->meters_per_pixel;
    std::ofstream out(sub / "meta.json");
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + (sub / "meta.json").string());
    out << meta.dump(2) << "\n";
  }
}

ToolModel capture_tool_model(const world::SceneObject& tool, int image_size, double camera_height,
                             double hfov_deg) {
  if (!tool.grasp_region.has_value()) {
    throw Error(ErrorCode::ValidationError, "tool " + tool.name + " has no grasp region");
  }
  // Stage the tool alone, flat at the origin, and look straight down at it.
  world::SceneObject staged = tool;
  staged.pose = world::Pose{{0.0, 0.0, tool.pose.position.z()}, {0.0, 0.0, 0.0}};
  staged.original_pose = staged.pose;

  perception::CameraModel cam = perception::make_top_down_camera(
      "tooldb", Eigen::Vector3d(0.0, 0.0, camera_height), image_size, image_size, hfov_deg);

  world::WorldState staging;
  staging.objects.push_back(staged);
  Rng rng(0);
  perception::RenderedView view =
      perception::render_view(staging, cam, perception::NoiseConfig{}, rng);

  ToolModel model;
  model.name = tool.name;
  model.full_mask = MaskImage(image_size, image_size, 0);
  model.region_mask = MaskImage(image_size, image_size, 0);

  double depth_sum = 0.0;
  int region_pixels = 0;
  for (int v = 0; v < image_size; ++v) {
    for (int u = 0; u < image_size; ++u) {
      if (view.ids.at(u, v) != 0) continue;  // staged tool is object index 0
      model.full_mask.at(u, v) = 1;
      const Eigen::Vector3d origin = cam.origin();
      const Eigen::Vector3d dir = cam.extrinsics.linear() * cam.pixel_dir(u, v);
      if (world::ray_hit_region(staged, origin, dir).has_value()) {
        model.region_mask.at(u, v) = 1;
        depth_sum += view.depth.at(u, v);
        ++region_pixels;
      }
    }
  }
  if (mask_area(model.full_mask) == 0) {
    throw Error(ErrorCode::CaptureError, "tool " + tool.name + " rendered no pixels");
  }
  if (region_pixels == 0) {
    throw Error(ErrorCode::CaptureError, "tool " + tool.name + " grasp region rendered no pixels");
  }
  // Ground-plane scale from the mean depth over the graspable part.
  model.meters_per_pixel = (depth_sum / region_pixels) / cam.fx;
  return model;
}

ToolDatabase build_tool_db(const std::vector<world::SceneObject>& tools, int image_size,
                           double camera_height, double hfov_deg) {
  ToolDatabase db;
  for (const auto& tool : tools) {
    db.insert(capture_tool_model(tool, image_size, camera_height, hfov_deg));
  }
  return db;
}

}  // namespace tabletop::grasp
