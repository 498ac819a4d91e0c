#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <optional>
#include <string>

namespace tabletop::perception {

// Pinhole camera. Extrinsics map camera coordinates to the robot base frame;
// camera axes are x right, y down, z forward. Rays go through pixel centers,
// so pixel (u, v) uses image-plane coordinates (u + 0.5 - cx, v + 0.5 - cy).
struct CameraModel {
  std::string id;
  int width = 320;
  int height = 240;
  double fx = 277.0;
  double fy = 277.0;
  double cx = 160.0;
  double cy = 120.0;
  Eigen::Isometry3d extrinsics = Eigen::Isometry3d::Identity();  // camera -> base

  // Direction through pixel (u, v) in camera coordinates, z = 1. Not
  // normalized: the ray parameter equals the z-depth.
  Eigen::Vector3d pixel_dir(int u, int v) const {
    return {(u + 0.5 - cx) / fx, (v + 0.5 - cy) / fy, 1.0};
  }

  Eigen::Vector3d origin() const { return extrinsics.translation(); }

  // Base-frame point of pixel (u, v) at the given z-depth.
  Eigen::Vector3d deproject(int u, int v, double depth) const {
    return extrinsics * (pixel_dir(u, v) * depth);
  }

  // Continuous pixel coordinates (u + 0.5 convention) or nullopt when the
  // point lies behind the image plane.
  std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& base_point) const {
    const Eigen::Vector3d p = extrinsics.inverse() * base_point;
    if (p.z() <= 1e-9) return std::nullopt;
    return Eigen::Vector2d(fx * p.x() / p.z() + cx - 0.5, fy * p.y() / p.z() + cy - 0.5);
  }
};

// Focal length for a given horizontal field of view.
double focal_from_hfov(int width, double hfov_deg);

// Camera at `position` looking at `target`, with the image x axis kept
// horizontal.
CameraModel make_look_at_camera(const std::string& id, const Eigen::Vector3d& position,
                                const Eigen::Vector3d& target, int width, int height,
                                double hfov_deg);

// Straight-down camera (image y along -y of the base frame), used for the
// in-hand view.
CameraModel make_top_down_camera(const std::string& id, const Eigen::Vector3d& position,
                                 int width, int height, double hfov_deg);

}  // namespace tabletop::perception
