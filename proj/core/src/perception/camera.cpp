#include "tabletop/perception/camera.hpp"

#include <cmath>

#include "tabletop/common/angles.hpp"
#include "tabletop/common/errors.hpp"

namespace tabletop::perception {

double focal_from_hfov(int width, double hfov_deg) {
  return (width / 2.0) / std::tan(deg2rad(hfov_deg) / 2.0);
}

CameraModel make_look_at_camera(const std::string& id, const Eigen::Vector3d& position,
                                const Eigen::Vector3d& target, int width, int height,
                                double hfov_deg) {
  const Eigen::Vector3d forward = (target - position).normalized();
  Eigen::Vector3d right = forward.cross(Eigen::Vector3d::UnitZ());
  if (right.norm() < 1e-9)
    throw Error(ErrorCode::ValidationError, "camera '" + id + "' looks straight along z; use make_top_down_camera");
  right.normalize();
  const Eigen::Vector3d down = forward.cross(right);

  CameraModel cam;
  cam.id = id;
  cam.width = width;
  cam.height = height;
  cam.fx = cam.fy = focal_from_hfov(width, hfov_deg);
  cam.cx = width / 2.0;
  cam.cy = height / 2.0;
  cam.extrinsics.linear().col(0) = right;
  cam.extrinsics.linear().col(1) = down;
  cam.extrinsics.linear().col(2) = forward;
  cam.extrinsics.translation() = position;
  return cam;
}

CameraModel make_top_down_camera(const std::string& id, const Eigen::Vector3d& position,
                                 int width, int height, double hfov_deg) {
  CameraModel cam;
  cam.id = id;
  cam.width = width;
  cam.height = height;
  cam.fx = cam.fy = focal_from_hfov(width, hfov_deg);
  cam.cx = width / 2.0;
  cam.cy = height / 2.0;
  // x -> x, y -> -y, z -> -z: looking straight down with image x along base x
  Eigen::Matrix3d r;
  r << 1, 0, 0,
       0, -1, 0,
       0, 0, -1;
  cam.extrinsics.linear() = r;
  cam.extrinsics.translation() = position;
  return cam;
}

}  // namespace tabletop::perception
