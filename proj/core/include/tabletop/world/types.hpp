#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tabletop/common/angles.hpp"

namespace tabletop::world {

struct Pose {
  Eigen::Vector3d position{0, 0, 0};
  Eigen::Vector3d rpy_deg{0, 0, 0};  // roll(x), pitch(y), yaw(z)

  // Rz(yaw) * Ry(pitch) * Rx(roll)
  Eigen::Matrix3d rotation() const {
    return (Eigen::AngleAxisd(deg2rad(rpy_deg[2]), Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(deg2rad(rpy_deg[1]), Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(deg2rad(rpy_deg[0]), Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
  }

  Eigen::Isometry3d transform() const {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.linear() = rotation();
    t.translation() = position;
    return t;
  }

  void normalize_angles() {
    for (int i = 0; i < 3; ++i) rpy_deg[i] = normalize_deg(rpy_deg[i]);
  }
};

enum class ShapeKind { Box, Cylinder, Sphere };

// One convex piece of an object, in the object's local frame. Boxes are
// axis-aligned with full extents `size`; cylinders stand along local +z with
// diameter size.x (== size.y) and height size.z; spheres have diameter
// size.x. `offset` is the piece's center.
struct Primitive {
  ShapeKind kind = ShapeKind::Box;
  Eigen::Vector3d size{0, 0, 0};
  Eigen::Vector3d offset{0, 0, 0};

  double radius() const { return size.x() / 2.0; }
  double height() const { return size.z(); }
};

inline Primitive make_box(const Eigen::Vector3d& size, const Eigen::Vector3d& offset = {0, 0, 0}) {
  return {ShapeKind::Box, size, offset};
}
inline Primitive make_cylinder(double radius, double height,
                               const Eigen::Vector3d& offset = {0, 0, 0}) {
  return {ShapeKind::Cylinder, {2 * radius, 2 * radius, height}, offset};
}
inline Primitive make_sphere(double radius, const Eigen::Vector3d& offset = {0, 0, 0}) {
  return {ShapeKind::Sphere, {2 * radius, 2 * radius, 2 * radius}, offset};
}

// Axis-aligned box in the object's local frame marking where a tool may be
// held (its handle). Present iff the object is a tool.
struct GraspRegion {
  Eigen::Vector3d center{0, 0, 0};
  Eigen::Vector3d size{0, 0, 0};

  bool contains(const Eigen::Vector3d& local_point, double inflate = 0.0) const {
    const Eigen::Vector3d d = (local_point - center).cwiseAbs();
    return d.x() <= size.x() / 2 + inflate && d.y() <= size.y() / 2 + inflate &&
           d.z() <= size.z() / 2 + inflate;
  }
};

enum class ToolClass { Scoop, Flattener, Whisk, Hammer, Spatula, Other };
std::string_view tool_class_name(ToolClass c);
std::optional<ToolClass> tool_class_from_name(std::string_view name);

// How an object responds to being acted on. Rigid is the default; the rest
// unlock specific effect rules.
enum class Category { Rigid, Granular, Dough, Container, Pointed };
std::string_view category_name(Category c);
std::optional<Category> category_from_name(std::string_view name);

struct SceneObject {
  std::string name;
  std::vector<Primitive> shape;
  Pose pose;
  Pose original_pose;
  bool is_tool = false;
  std::optional<ToolClass> tool_class;
  std::optional<GraspRegion> grasp_region;
  Category category = Category::Rigid;
};

// Rigid link between the gripper and a held object.
struct Attachment {
  std::string object;
  Eigen::Isometry3d tcp_to_object = Eigen::Isometry3d::Identity();
  Eigen::Vector3d local_point{0, 0, 0};  // contact point in the object frame
  bool in_grasp_region = false;
};

struct RobotState {
  Pose tcp;
  Pose home;
  bool gripper_open = true;
  std::optional<Attachment> held;
};

// Per-object consequences of tool use.
struct ObjectEffects {
  bool flattened = false;
  bool whisked = false;
  int holes_poked = 0;
  std::set<std::string> contains;

  bool any() const { return flattened || whisked || holes_poked > 0 || !contains.empty(); }
};

// Bookkeeping that spans several actions: a scoop that has swept through
// granular material but not yet tilted up, and whisk stroke directions.
struct MotionTrackers {
  std::map<std::string, std::string> pending_scoop;              // tool -> material
  std::map<std::string, Eigen::Vector2d> last_stroke;            // tool -> horizontal dir
  std::map<std::string, std::map<std::string, int>> reversals;   // tool -> bowl -> count
};

struct Event {
  std::string kind;
  std::map<std::string, std::string> detail;
};

struct WorldState {
  double table_height = 0.0;
  std::vector<SceneObject> objects;
  RobotState robot;
  std::map<std::string, ObjectEffects> effects;  // keyed by object name
  MotionTrackers trackers;
  std::uint64_t revision = 0;

  const SceneObject* find(std::string_view name) const;
  SceneObject* find(std::string_view name);
  int index_of(std::string_view name) const;

  const ObjectEffects& effects_of(std::string_view name) const;
  ObjectEffects& effects_of(std::string_view name);

  // Name of the container/tool currently holding `name`, if any.
  std::optional<std::string> container_of(std::string_view name) const;
};

Pose default_home_pose();

}  // namespace tabletop::world
