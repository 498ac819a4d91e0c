#include "tabletop/grasp/tog.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tabletop/common/angles.hpp"
#include "tabletop/common/errors.hpp"
#include "tabletop/grasp/align.hpp"

namespace tabletop::grasp {

OverheadCapture capture_overhead(const world::WorldState& world, const Eigen::Vector3d& target,
                                 const GraspPlannerConfig& cfg, Rng& rng) {
  OverheadCapture cap;
  const Eigen::Vector3d eye(target.x(), target.y(), target.z() + cfg.camera_height);
  cap.camera = perception::make_top_down_camera("wrist", eye, cfg.image_size, cfg.image_size,
                                                cfg.hfov_deg);
  perception::RenderedView view = perception::render_view(world, cap.camera, cfg.noise, rng);
  cap.depth = view.depth;

  // The subject is whichever object owns the most pixels near the image
  // center; a small window keeps neighbors out of the vote.
  const int half = std::max(1, static_cast<int>(std::lround(cfg.image_size * cfg.center_window / 2.0)));
  const int cx = cfg.image_size / 2;
  const int cy = cfg.image_size / 2;
  std::map<int, int> votes;
  for (int v = cy - half; v < cy + half; ++v) {
    for (int u = cx - half; u < cx + half; ++u) {
      if (!view.ids.in_bounds(u, v)) continue;
      const int id = view.ids.at(u, v);
      if (id >= 0) ++votes[id];
    }
  }
  if (votes.empty()) {
    throw Error(ErrorCode::CaptureError, "nothing under the wrist camera");
  }
  int subject = -1;
  int best = -1;
  for (const auto& [id, count] : votes) {
    if (count > best) {
      best = count;
      subject = id;
    }
  }

  cap.mask = MaskImage(cfg.image_size, cfg.image_size, 0);
  std::vector<double> depths;
  for (int v = 0; v < cfg.image_size; ++v) {
    for (int u = 0; u < cfg.image_size; ++u) {
      if (view.ids.at(u, v) != subject) continue;
      cap.mask.at(u, v) = 1;
      depths.push_back(view.depth.at(u, v));
    }
  }
  const size_t mid = depths.size() / 2;
  std::nth_element(depths.begin(), depths.begin() + mid, depths.end());
  cap.meters_per_pixel = depths[mid] / cap.camera.fx;
  return cap;
}

namespace {

// Depth at the pixel, searching a small neighborhood if the exact pixel has
// no return (can happen at mask edges under noise rounding).
double depth_near(const DepthImage& depth, int u, int v) {
  for (int radius = 0; radius <= 2; ++radius) {
    for (int dv = -radius; dv <= radius; ++dv) {
      for (int du = -radius; du <= radius; ++du) {
        const int su = u + du;
        const int sv = v + dv;
        if (!depth.in_bounds(su, sv)) continue;
        const double d = depth.at(su, sv);
        if (d > 0.0) return d;
      }
    }
  }
  throw Error(ErrorCode::CaptureError, "no depth at the selected grasp pixel");
}

GraspCandidate centroid_candidate(const MaskImage& mask, const Image<double>& field,
                                  double meters_per_pixel, const CandidateConfig& cc) {
  const MaskMoments m = compute_moments(mask);
  int u = static_cast<int>(std::lround(m.cx));
  int v = static_cast<int>(std::lround(m.cy));
  if (!mask.in_bounds(u, v) || mask.at(u, v) == 0) {
    // Centroid fell off the silhouette (bent shapes); snap to the nearest
    // mask pixel.
    long best = -1;
    for (int sv = 0; sv < mask.height(); ++sv) {
      for (int su = 0; su < mask.width(); ++su) {
        if (mask.at(su, sv) == 0) continue;
        const long du = su - u;
        const long dv = sv - v;
        const long d2 = du * du + dv * dv;
        if (best < 0 || d2 < best) {
          best = d2;
          u = su;
          v = sv;
        }
      }
    }
    if (best < 0) throw Error(ErrorCode::GraspInfeasible, "empty mask");
  }
  GraspCandidate cand;
  cand.u = u;
  cand.v = v;
  const double angle_step = 180.0 / cc.num_angles;
  double best_width = 0.0;
  for (int a = 0; a < cc.num_angles; ++a) {
    const double angle = a * angle_step;
    const double width = masked_extent_px(mask, u, v, angle) * meters_per_pixel;
    if (a == 0 || width < best_width) {
      best_width = width;
      cand.angle_deg = angle;
    }
  }
  cand.width_m = best_width;
  cand.score = field.at(u, v);
  if (cand.width_m > cc.max_width_m) {
    throw Error(ErrorCode::GraspInfeasible, "object too wide at its centroid for the gripper");
  }
  return cand;
}

}  // namespace

GraspPlan plan_grasp(const world::WorldState& world, const Eigen::Vector3d& measured_centroid,
                     const std::optional<std::string>& db_model, const ToolDatabase& db,
                     const GraspPlannerConfig& cfg, Rng& rng) {
  const OverheadCapture cap = capture_overhead(world, measured_centroid, cfg, rng);

  GraspPlan plan;
  plan.no_affordance = cfg.no_affordance;
  plan.query_mask = cap.mask;
  plan.heatmap = grasp_quality_field(cap.mask);

  // Bring the stored graspable region onto the live silhouette.
  MaskImage region;
  if (db_model.has_value()) {
    const ToolModel* model = db.find(*db_model);
    if (model != nullptr) {
      const auto align = align_masks(model->full_mask, cap.mask, cfg.min_align_iou);
      if (align.has_value()) {
        const MaskMoments pivot = compute_moments(model->full_mask);
        MaskImage warped = warp_mask(model->region_mask, *align, cap.mask.width(), cap.mask.height(),
                                     std::make_pair(pivot.cx, pivot.cy));
        // Only pixels on the live silhouette are graspable.
        for (size_t i = 0; i < warped.data().size(); ++i) {
          if (cap.mask.data()[i] == 0) warped.data()[i] = 0;
        }
        if (mask_area(warped) > 0) {
          region = warped;
          plan.db_model = *db_model;
          plan.align_iou = align->iou;
        }
      }
    }
  }
  plan.used_fallback = (mask_area(region) == 0);
  if (!plan.used_fallback) plan.region_mask = region;

  if (cfg.no_affordance) {
    plan.picked = centroid_candidate(cap.mask, plan.heatmap, cap.meters_per_pixel, cfg.candidates);
  } else {
    std::vector<GraspCandidate> cands = generate_grasps(cap.mask, cap.meters_per_pixel, cfg.candidates);
    if (cands.empty()) {
      throw Error(ErrorCode::GraspInfeasible, "no feasible grasp on the captured silhouette");
    }
    const GraspCandidate* pick = nullptr;
    if (!plan.used_fallback) {
      for (const auto& cand : cands) {
        if (region.at(cand.u, cand.v) != 0) {
          pick = &cand;
          break;
        }
      }
      if (pick == nullptr) plan.used_fallback = true;
    }
    if (pick == nullptr) pick = &cands.front();
    plan.picked = *pick;
  }
  if (!plan.region_mask.data().empty()) {
    plan.pixel_in_region = plan.region_mask.at(plan.picked.u, plan.picked.v) != 0;
  }

  // Lift the pixel pick to a wrist pose: contact at the surface point, jaw
  // closing along the image angle. The jaw runs along the gripper's y axis,
  // the top-down camera maps image +u to world +x and +v to world -y, and the
  // jaw axis is symmetric, so the yaw can be folded into (-90, 90]. That fold
  // keeps the gripper near identity yaw when closing across a lengthwise
  // handle, which keeps later absolute Tilt targets meaningful.
  const double d = depth_near(cap.depth, plan.picked.u, plan.picked.v);
  const Eigen::Vector3d contact = cap.camera.deproject(plan.picked.u, plan.picked.v, d);
  plan.tcp_pose.position = contact;
  double yaw = 90.0 - plan.picked.angle_deg;
  while (yaw <= -90.0) yaw += 180.0;
  while (yaw > 90.0) yaw -= 180.0;
  plan.tcp_pose.rpy_deg = {0.0, 0.0, yaw};
  return plan;
}

}  // namespace tabletop::grasp
