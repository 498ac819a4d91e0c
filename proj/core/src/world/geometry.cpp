#include "tabletop/world/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tabletop/common/errors.hpp"

namespace tabletop::world {

namespace {

// Support extents of a rotated primitive along the world axes.
Aabb primitive_aabb_impl(const Primitive& prim, const Eigen::Matrix3d& R,
                         const Eigen::Vector3d& center_world) {
  Eigen::Vector3d half;
  switch (prim.kind) {
    case ShapeKind::Box: {
      const Eigen::Vector3d h = prim.size / 2.0;
      for (int i = 0; i < 3; ++i)
        half[i] = std::abs(R(i, 0)) * h.x() + std::abs(R(i, 1)) * h.y() + std::abs(R(i, 2)) * h.z();
      break;
    }
    case ShapeKind::Cylinder: {
      const double r = prim.radius();
      const double hh = prim.height() / 2.0;
      const Eigen::Vector3d axis = R.col(2);
      for (int i = 0; i < 3; ++i) {
        const double a = std::clamp(axis[i], -1.0, 1.0);
        half[i] = hh * std::abs(a) + r * std::sqrt(std::max(0.0, 1.0 - a * a));
      }
      break;
    }
    case ShapeKind::Sphere: {
      half.setConstant(prim.radius());
      break;
    }
  }
  return {center_world - half, center_world + half};
}

struct LocalClosest {
  Eigen::Vector3d point;
  double distance;
};

// Closest point of the solid to p, in the primitive's own frame (offset
// removed). Points inside map to themselves with distance 0.
LocalClosest closest_in_primitive(const Primitive& prim, const Eigen::Vector3d& p) {
  switch (prim.kind) {
    case ShapeKind::Box: {
      const Eigen::Vector3d h = prim.size / 2.0;
      const Eigen::Vector3d q = p.cwiseMax(-h).cwiseMin(h);
      return {q, (p - q).norm()};
    }
    case ShapeKind::Cylinder: {
      const double r = prim.radius();
      const double hh = prim.height() / 2.0;
      const double rad = std::hypot(p.x(), p.y());
      Eigen::Vector3d q = p;
      if (rad > r) {
        const double s = r / rad;
        q.x() *= s;
        q.y() *= s;
      }
      q.z() = std::clamp(p.z(), -hh, hh);
      return {q, (p - q).norm()};
    }
    case ShapeKind::Sphere: {
      const double r = prim.radius();
      const double d = p.norm();
      if (d <= r) return {p, 0.0};
      return {p * (r / d), d - r};
    }
  }
  return {p, 0.0};
}

std::optional<double> ray_box(const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                              const Eigen::Vector3d& half, double t_min) {
  double t0 = -1e30, t1 = 1e30;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-15) {
      if (std::abs(o[i]) > half[i]) return std::nullopt;
      continue;
    }
    double a = (-half[i] - o[i]) / d[i];
    double b = (half[i] - o[i]) / d[i];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return std::nullopt;
  }
  if (t1 < t_min) return std::nullopt;
  return std::max(t0, t_min);
}

std::optional<double> ray_sphere(const Eigen::Vector3d& o, const Eigen::Vector3d& d, double r,
                                 double t_min) {
  const double a = d.squaredNorm();
  const double b = 2.0 * o.dot(d);
  const double c = o.squaredNorm() - r * r;
  const double disc = b * b - 4 * a * c;
  if (disc < 0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double t0 = (-b - sq) / (2 * a);
  const double t1 = (-b + sq) / (2 * a);
  if (t0 >= t_min) return t0;
  if (t1 >= t_min) return t1;
  return std::nullopt;
}

std::optional<double> ray_cylinder(const Eigen::Vector3d& o, const Eigen::Vector3d& d, double r,
                                   double hh, double t_min) {
  std::optional<double> best;
  auto consider = [&](double t) {
    if (t < t_min) return;
    if (!best || t < *best) best = t;
  };
  // lateral surface
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 1e-15) {
    const double b = 2.0 * (o.x() * d.x() + o.y() * d.y());
    const double c = o.x() * o.x() + o.y() * o.y() - r * r;
    const double disc = b * b - 4 * a * c;
    if (disc >= 0) {
      const double sq = std::sqrt(disc);
      for (double t : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)}) {
        const double z = o.z() + t * d.z();
        if (std::abs(z) <= hh) consider(t);
      }
    }
  }
  // end caps
  if (std::abs(d.z()) > 1e-15) {
    for (double zcap : {-hh, hh}) {
      const double t = (zcap - o.z()) / d.z();
      const double x = o.x() + t * d.x();
      const double y = o.y() + t * d.y();
      if (x * x + y * y <= r * r) consider(t);
    }
  }
  return best;
}

}  // namespace

Aabb primitive_world_aabb(const Primitive& prim, const Eigen::Isometry3d& pose) {
  return primitive_aabb_impl(prim, pose.linear(), pose * prim.offset);
}

Aabb object_aabb(const SceneObject& obj) {
  if (obj.shape.empty()) throw Error(ErrorCode::SceneError, "object '" + obj.name + "' has no shape");
  const Eigen::Isometry3d t = obj.pose.transform();
  Aabb out = primitive_world_aabb(obj.shape[0], t);
  for (size_t i = 1; i < obj.shape.size(); ++i) out.merge(primitive_world_aabb(obj.shape[i], t));
  return out;
}

double primitive_volume(const Primitive& prim) {
  switch (prim.kind) {
    case ShapeKind::Box: return prim.size.prod();
    case ShapeKind::Cylinder: return kPi * prim.radius() * prim.radius() * prim.height();
    case ShapeKind::Sphere: return 4.0 / 3.0 * kPi * std::pow(prim.radius(), 3);
  }
  return 0.0;
}

double object_volume(const SceneObject& obj) {
  double v = 0;
  for (const auto& p : obj.shape) v += primitive_volume(p);
  return v;
}

Eigen::Vector3d object_centroid_world(const SceneObject& obj) {
  const Eigen::Isometry3d t = obj.pose.transform();
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  double vol = 0;
  for (const auto& p : obj.shape) {
    const double v = primitive_volume(p);
    acc += v * (t * p.offset);
    vol += v;
  }
  if (vol <= 0) throw Error(ErrorCode::SceneError, "object '" + obj.name + "' has zero volume");
  return acc / vol;
}

ClosestPoint closest_point(const SceneObject& obj, const Eigen::Vector3d& query_world) {
  const Eigen::Isometry3d t = obj.pose.transform();
  const Eigen::Isometry3d inv = t.inverse();
  const Eigen::Vector3d q_local = inv * query_world;
  ClosestPoint best;
  best.distance = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < obj.shape.size(); ++i) {
    const auto lc = closest_in_primitive(obj.shape[i], q_local - obj.shape[i].offset);
    if (lc.distance < best.distance) {
      best.local = lc.point + obj.shape[i].offset;
      best.world = t * best.local;
      best.distance = lc.distance;
      best.primitive = static_cast<int>(i);
    }
  }
  return best;
}

std::optional<double> ray_hit(const SceneObject& obj, const Eigen::Vector3d& origin,
                              const Eigen::Vector3d& dir, double t_min) {
  const Eigen::Isometry3d inv = obj.pose.transform().inverse();
  const Eigen::Vector3d o_obj = inv * origin;
  const Eigen::Vector3d d_obj = inv.linear() * dir;
  std::optional<double> best;
  for (const auto& prim : obj.shape) {
    const Eigen::Vector3d o = o_obj - prim.offset;
    std::optional<double> t;
    switch (prim.kind) {
      case ShapeKind::Box: t = ray_box(o, d_obj, prim.size / 2.0, t_min); break;
      case ShapeKind::Cylinder:
        t = ray_cylinder(o, d_obj, prim.radius(), prim.height() / 2.0, t_min);
        break;
      case ShapeKind::Sphere: t = ray_sphere(o, d_obj, prim.radius(), t_min); break;
    }
    if (t && (!best || *t < *best)) best = t;
  }
  return best;
}

std::optional<double> ray_hit_region(const SceneObject& obj, const Eigen::Vector3d& origin,
                                     const Eigen::Vector3d& dir, double t_min) {
  if (!obj.grasp_region) return std::nullopt;
  const Eigen::Isometry3d inv = obj.pose.transform().inverse();
  const Eigen::Vector3d o = (inv * origin) - obj.grasp_region->center;
  const Eigen::Vector3d d = inv.linear() * dir;
  return ray_box(o, d, obj.grasp_region->size / 2.0, t_min);
}

double grasp_width(const Primitive& prim) {
  switch (prim.kind) {
    case ShapeKind::Box: return std::min(prim.size.x(), prim.size.y());
    case ShapeKind::Cylinder:
    case ShapeKind::Sphere: return prim.size.x();
  }
  return 0.0;
}

bool is_head_primitive(const SceneObject& obj, size_t index) {
  if (!obj.grasp_region) return true;
  return !obj.grasp_region->contains(obj.shape[index].offset);
}

namespace {

Eigen::Vector3d part_centroid_local(const SceneObject& obj, bool head) {
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  double vol = 0;
  for (size_t i = 0; i < obj.shape.size(); ++i) {
    if (is_head_primitive(obj, i) != head) continue;
    const double v = primitive_volume(obj.shape[i]);
    acc += v * obj.shape[i].offset;
    vol += v;
  }
  if (vol <= 0) {
    // degenerate split; fall back to the whole object
    acc.setZero();
    vol = 0;
    for (const auto& p : obj.shape) {
      const double v = primitive_volume(p);
      acc += v * p.offset;
      vol += v;
    }
  }
  return acc / vol;
}

}  // namespace

Eigen::Vector3d head_centroid_local(const SceneObject& obj) {
  return part_centroid_local(obj, true);
}

Eigen::Vector3d handle_centroid_local(const SceneObject& obj) {
  return part_centroid_local(obj, false);
}

Aabb head_aabb_world(const SceneObject& obj) {
  const Eigen::Isometry3d t = obj.pose.transform();
  std::optional<Aabb> out;
  for (size_t i = 0; i < obj.shape.size(); ++i) {
    if (!is_head_primitive(obj, i)) continue;
    const Aabb a = primitive_world_aabb(obj.shape[i], t);
    if (out)
      out->merge(a);
    else
      out = a;
  }
  if (!out) return object_aabb(obj);
  return *out;
}

Eigen::Vector3d head_direction_world(const SceneObject& obj) {
  const Eigen::Vector3d local = head_centroid_local(obj) - handle_centroid_local(obj);
  if (local.norm() < 1e-12) return obj.pose.rotation() * Eigen::Vector3d::UnitX();
  return obj.pose.rotation() * local.normalized();
}

double head_elevation_deg(const SceneObject& obj) {
  const Eigen::Vector3d dir = head_direction_world(obj);
  return rad2deg(std::asin(std::clamp(dir.z(), -1.0, 1.0)));
}

}  // namespace tabletop::world
