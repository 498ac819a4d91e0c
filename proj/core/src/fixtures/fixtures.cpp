#include "tabletop/fixtures/fixtures.hpp"

#include <cmath>

#include "tabletop/common/angles.hpp"
#include "tabletop/world/geometry.hpp"

namespace tabletop::fixtures {

using world::Category;
using world::GraspRegion;
using world::Pose;
using world::SceneObject;
using world::ToolClass;

namespace {

SceneObject place(SceneObject obj, double x, double y, double rest_z) {
  obj.pose = Pose{{x, y, rest_z}, {0, 0, 0}};
  obj.original_pose = obj.pose;
  return obj;
}

}  // namespace

SceneObject make_scoop(const std::string& name, double x, double y) {
  SceneObject o;
  o.name = name;
  o.is_tool = true;
  o.tool_class = ToolClass::Scoop;
  o.shape = {world::make_box({0.06, 0.045, 0.02}, {-0.05, 0, 0}),
             world::make_box({0.10, 0.016, 0.016}, {0.03, 0, 0})};
  o.grasp_region = GraspRegion{{0.035, 0, 0}, {0.09, 0.02, 0.02}};
  return place(std::move(o), x, y, 0.01);
}

SceneObject make_spatula(const std::string& name, double x, double y) {
  SceneObject o;
  o.name = name;
  o.is_tool = true;
  o.tool_class = ToolClass::Spatula;
  o.shape = {world::make_box({0.07, 0.05, 0.006}, {-0.0475, 0, 0}),
             world::make_box({0.10, 0.016, 0.008}, {0.0325, 0, 0})};
  o.grasp_region = GraspRegion{{0.0375, 0, 0}, {0.085, 0.02, 0.02}};
  return place(std::move(o), x, y, 0.004);
}

SceneObject make_flattener(const std::string& name, double x, double y) {
  SceneObject o;
  o.name = name;
  o.is_tool = true;
  o.tool_class = ToolClass::Flattener;
  // Stamp shape: square press plate under a vertical grip.
  o.shape = {world::make_box({0.06, 0.06, 0.01}, {0, 0, -0.025}),
             world::make_cylinder(0.01, 0.05, {0, 0, 0.005})};
  o.grasp_region = GraspRegion{{0, 0, 0.005}, {0.024, 0.024, 0.05}};
  return place(std::move(o), x, y, 0.03);
}

SceneObject make_whisk(const std::string& name, double x, double y) {
  SceneObject o;
  o.name = name;
  o.is_tool = true;
  o.tool_class = ToolClass::Whisk;
  // Balloon cage approximated by a cylinder: flat top and full side stay
  // visible to the ring cameras, so the measured box is unbiased, and the
  // head still owns most of the silhouette so a centroid grasp lands on it
  // rather than on the handle.
  o.shape = {world::make_cylinder(0.028, 0.056, {-0.039, 0, 0}),
             world::make_box({0.10, 0.016, 0.016}, {0.025, 0, 0})};
  o.grasp_region = GraspRegion{{0.0375, 0, 0}, {0.071, 0.018, 0.018}};
  return place(std::move(o), x, y, 0.028);
}

SceneObject make_poker(const std::string& name, double x, double y) {
  SceneObject o;
  o.name = name;
  o.is_tool = true;
  o.tool_class = ToolClass::Other;
  o.category = Category::Pointed;
  o.shape = {world::make_cylinder(0.0025, 0.02, {0, 0, -0.03}),
             world::make_cylinder(0.008, 0.06, {0, 0, 0.01})};
  o.grasp_region = GraspRegion{{0, 0, 0.01}, {0.018, 0.018, 0.06}};
  return place(std::move(o), x, y, 0.04);
}

SceneObject make_hammer(const std::string& name, double x, double y) {
  SceneObject o;
  o.name = name;
  o.is_tool = true;
  o.tool_class = ToolClass::Hammer;
  o.shape = {world::make_box({0.02, 0.06, 0.02}, {-0.05, 0, 0}),
             world::make_box({0.10, 0.014, 0.014}, {0.01, 0, 0})};
  o.grasp_region = GraspRegion{{0.015, 0, 0}, {0.085, 0.018, 0.018}};
  return place(std::move(o), x, y, 0.01);
}

SceneObject make_tomato(const std::string& name, double x, double y) {
  SceneObject o;
  o.name = name;
  o.shape = {world::make_sphere(0.02)};
  return place(std::move(o), x, y, 0.02);
}

SceneObject make_bowl(const std::string& name, double x, double y) {
  SceneObject o;
  o.name = name;
  o.category = Category::Container;
  o.shape = {world::make_cylinder(0.05, 0.045)};
  return place(std::move(o), x, y, 0.0225);
}

SceneObject make_plate(const std::string& name, double x, double y) {
  SceneObject o;
  o.name = name;
  o.shape = {world::make_cylinder(0.05, 0.01)};
  return place(std::move(o), x, y, 0.005);
}

SceneObject make_candies(const std::string& name, double x, double y) {
  SceneObject o;
  o.name = name;
  o.category = Category::Granular;
  o.shape = {world::make_box({0.05, 0.05, 0.014})};
  return place(std::move(o), x, y, 0.007);
}

SceneObject make_dough(const std::string& name, double x, double y) {
  SceneObject o;
  o.name = name;
  o.category = Category::Dough;
  o.shape = {world::make_sphere(0.025)};
  return place(std::move(o), x, y, 0.025);
}

SceneObject make_board(const std::string& name, double x, double y) {
  SceneObject o;
  o.name = name;
  o.shape = {world::make_box({0.20, 0.15, 0.01})};
  return place(std::move(o), x, y, 0.005);
}

std::vector<world::SceneObject> db_tool_catalog() {
  return {make_scoop("scoop", 0, 0),      make_spatula("spatula", 0, 0),
          make_flattener("flattener", 0, 0), make_whisk("whisk", 0, 0),
          make_hammer("hammer", 0, 0)};
}

perception::PerceptionConfig default_rig() {
  perception::PerceptionConfig config;
  const Eigen::Vector3d focus(0.45, 0.0, 0.03);
  const double radius = 0.75;
  const double elevation = deg2rad(20.0);
  for (int i = 0; i < 4; ++i) {
    const double azimuth = deg2rad(45.0 + 90.0 * i);
    const Eigen::Vector3d offset(radius * std::cos(elevation) * std::cos(azimuth),
                                 radius * std::cos(elevation) * std::sin(azimuth),
                                 radius * std::sin(elevation));
    config.cameras.push_back(perception::make_look_at_camera(
        "cam" + std::to_string(i), focus + offset, focus, 320, 240, 70.0));
  }
  return config;
}

namespace {

world::WorldState scene_from(std::vector<SceneObject> objects) {
  world::WorldState state;
  state.objects = std::move(objects);
  state.robot.home = world::default_home_pose();
  state.robot.tcp = state.robot.home;
  return state;
}

}  // namespace

world::WorldState scene_kitchen() {
  return scene_from({make_tomato("tomato", 0.38, -0.14), make_bowl("bowl", 0.52, 0.10),
                     make_plate("plate", 0.36, 0.10), make_spatula("spatula", 0.52, -0.12)});
}

world::WorldState scene_scoop_candy() {
  return scene_from({make_scoop("scoop", 0.36, -0.14), make_candies("candies", 0.50, 0.02),
                     make_plate("plate", 0.36, 0.14)});
}

world::WorldState scene_flatten() {
  return scene_from({make_flattener("flattener", 0.36, -0.14), make_dough("dough", 0.50, 0.02),
                     make_tomato("tomato", 0.36, 0.14)});
}

world::WorldState scene_whisk() {
  return scene_from({make_whisk("whisk", 0.36, -0.14), make_bowl("bowl", 0.52, 0.04),
                     make_tomato("tomato", 0.34, 0.12)});
}

world::WorldState scene_scoop_to_bowl() {
  return scene_from({make_scoop("scoop", 0.36, -0.14), make_candies("candies", 0.50, 0.02),
                     make_bowl("bowl", 0.36, 0.16)});
}

world::WorldState scene_flatten_poke() {
  return scene_from({make_flattener("flattener", 0.36, -0.14), make_poker("poker", 0.34, 0.12),
                     make_dough("dough", 0.50, 0.00)});
}

world::WorldState scene_scoop_to_dough() {
  return scene_from({make_flattener("flattener", 0.34, -0.16), make_scoop("scoop", 0.34, 0.16),
                     make_spatula("spatula", 0.56, 0.16), make_candies("candies", 0.48, 0.00),
                     make_dough("dough", 0.60, -0.08)});
}

world::WorldState scene_place_board() {
  return scene_from({make_hammer("hammer", 0.36, -0.12), make_board("table", 0.52, 0.08)});
}

std::vector<world::WorldState> all_scenes() {
  return {scene_kitchen(),      scene_scoop_candy(),    scene_flatten(),
          scene_whisk(),        scene_scoop_to_bowl(),  scene_flatten_poke(),
          scene_scoop_to_dough(), scene_place_board()};
}

world::WorldState randomize_scene(const world::WorldState& base, Rng& rng,
                                  double amplitude, double min_separation) {
  const int attempts = 100;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    world::WorldState candidate = base;
    for (auto& obj : candidate.objects) {
      obj.pose.position.x() += rng.uniform(-amplitude, amplitude);
      obj.pose.position.y() += rng.uniform(-amplitude, amplitude);
      obj.original_pose = obj.pose;
    }
    bool ok = true;
    for (size_t i = 0; i + 1 < candidate.objects.size() && ok; ++i) {
      for (size_t j = i + 1; j < candidate.objects.size() && ok; ++j) {
        const Eigen::Vector3d d = candidate.objects[i].pose.position -
                                  candidate.objects[j].pose.position;
        if (d.head<2>().norm() < min_separation) ok = false;
      }
    }
    if (ok) return candidate;
  }
  return base;
}

}  // namespace tabletop::fixtures
