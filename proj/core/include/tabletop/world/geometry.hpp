#pragma once

#include <optional>

#include "tabletop/world/types.hpp"

namespace tabletop::world {

struct Aabb {
  Eigen::Vector3d min{0, 0, 0};
  Eigen::Vector3d max{0, 0, 0};

  Eigen::Vector3d center() const { return 0.5 * (min + max); }
  Eigen::Vector3d size() const { return max - min; }

  bool contains(const Eigen::Vector3d& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool contains_xy(double x, double y) const {
    return x >= min.x() && x <= max.x() && y >= min.y() && y <= max.y();
  }
  // Half-diagonal of the footprint; used as the reach of an object in the
  // table plane.
  double xy_circumradius() const {
    return 0.5 * std::hypot(max.x() - min.x(), max.y() - min.y());
  }
  void merge(const Aabb& o) {
    min = min.cwiseMin(o.min);
    max = max.cwiseMax(o.max);
  }
};

// Exact world-frame bounds under arbitrary rotation (projected support
// extents, not transformed corner boxes).
Aabb primitive_world_aabb(const Primitive& prim, const Eigen::Isometry3d& pose);
Aabb object_aabb(const SceneObject& obj);

double primitive_volume(const Primitive& prim);
double object_volume(const SceneObject& obj);

// Volume-weighted centroid of the pieces, in world coordinates.
Eigen::Vector3d object_centroid_world(const SceneObject& obj);

struct ClosestPoint {
  Eigen::Vector3d world;
  Eigen::Vector3d local;  // object frame
  double distance = 0.0;  // 0 when the query point is inside the solid
  int primitive = -1;
};
ClosestPoint closest_point(const SceneObject& obj, const Eigen::Vector3d& query_world);

// Nearest intersection parameter t (in units of |dir|) of the ray
// origin + t * dir with the object's solid, or nullopt. dir need not be
// normalized.
std::optional<double> ray_hit(const SceneObject& obj, const Eigen::Vector3d& origin,
                              const Eigen::Vector3d& dir, double t_min = 1e-9);

// Same test against a tool's grasp-region box.
std::optional<double> ray_hit_region(const SceneObject& obj, const Eigen::Vector3d& origin,
                                     const Eigen::Vector3d& dir, double t_min = 1e-9);

// Opening the jaws around one piece: the smaller horizontal extent of a box,
// or the diameter of a cylinder/sphere.
double grasp_width(const Primitive& prim);

// Tool anatomy. Pieces whose centers fall inside the grasp region form the
// handle; everything else is the working head. Objects without a region are
// all head.
bool is_head_primitive(const SceneObject& obj, size_t index);
Eigen::Vector3d head_centroid_local(const SceneObject& obj);
Eigen::Vector3d handle_centroid_local(const SceneObject& obj);
Aabb head_aabb_world(const SceneObject& obj);

// Unit vector from handle toward head, in world coordinates, and its
// elevation angle above the horizon in degrees. Tilting the head up gives a
// positive elevation.
Eigen::Vector3d head_direction_world(const SceneObject& obj);
double head_elevation_deg(const SceneObject& obj);

}  // namespace tabletop::world
