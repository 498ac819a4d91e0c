#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tabletop/common/image.hpp"
#include "tabletop/world/types.hpp"

namespace tabletop::grasp {

// Stored top-down knowledge about one tool model: its full silhouette, the
// part of it that should be held, and the image scale.
struct ToolModel {
  std::string name;
  MaskImage full_mask;
  MaskImage region_mask;          // graspable subset of full_mask
  double meters_per_pixel = 0.0;

  bool operator==(const ToolModel&) const = default;
};

class ToolDatabase {
 public:
  void insert(ToolModel model);
  const ToolModel* find(const std::string& name) const;
  std::vector<std::string> names() const;
  size_t size() const { return models_.size(); }

 private:
  std::map<std::string, ToolModel> models_;
};

// Directory layout: <dir>/<name>/{full.pgm, region.pgm, meta.json}. meta
// holds the name and meters_per_pixel.
ToolDatabase load_tool_db(const std::filesystem::path& dir);
void save_tool_db(const ToolDatabase& db, const std::filesystem::path& dir);

// Renders each tool alone under a straight-down camera and records its
// silhouette plus the pixels whose rays pass through the tool's grasp-region
// box.
ToolModel capture_tool_model(const world::SceneObject& tool, int image_size, double camera_height,
                             double hfov_deg);
ToolDatabase build_tool_db(const std::vector<world::SceneObject>& tools, int image_size = 240,
                           double camera_height = 0.30, double hfov_deg = 60.0);

}  // namespace tabletop::grasp
