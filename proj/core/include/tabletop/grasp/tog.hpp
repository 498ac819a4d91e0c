#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "tabletop/common/rng.hpp"
#include "tabletop/grasp/candidates.hpp"
#include "tabletop/grasp/tooldb.hpp"
#include "tabletop/perception/camera.hpp"
#include "tabletop/perception/render.hpp"
#include "tabletop/world/types.hpp"

namespace tabletop::grasp {

struct GraspPlannerConfig {
  int image_size = 240;
  double camera_height = 0.30;  // wrist camera height above the target point
  double hfov_deg = 60.0;
  perception::NoiseConfig noise;
  CandidateConfig candidates;
  double min_align_iou = 0.5;
  double center_window = 1.0 / 3.0;  // fraction of the image used to pick the subject
  bool no_affordance = false;        // ablation: grasp at the mask centroid
};

// One wrist-camera shot straight down at the target point, segmented to the
// object that dominates the center of the frame.
struct OverheadCapture {
  perception::CameraModel camera;
  DepthImage depth;
  MaskImage mask;
  double meters_per_pixel = 0.0;
};

OverheadCapture capture_overhead(const world::WorldState& world, const Eigen::Vector3d& target,
                                 const GraspPlannerConfig& cfg, Rng& rng);

struct GraspPlan {
  world::Pose tcp_pose;                    // top-surface contact pose for the gripper
  GraspCandidate picked;                   // pixel-space selection
  bool used_fallback = false;              // region transfer unavailable, used whole mask
  bool no_affordance = false;              // ablation mode was active
  std::optional<std::string> db_model;     // database entry the region came from
  double align_iou = 0.0;                  // 0 when no alignment succeeded
  bool pixel_in_region = false;            // diagnostic: pick landed in transferred region
  MaskImage query_mask;
  MaskImage region_mask;                   // transferred graspable region (empty on fallback)
  Image<double> heatmap;                   // boundary-distance quality field
};

// Picks a top-down grasp for whatever sits under the wrist camera at
// measured_centroid. When db_model names a known tool, its graspable-region
// mask is registered onto the live silhouette and candidates are confined to
// it; otherwise (or when registration fails) the whole silhouette is used.
GraspPlan plan_grasp(const world::WorldState& world, const Eigen::Vector3d& measured_centroid,
                     const std::optional<std::string>& db_model, const ToolDatabase& db,
                     const GraspPlannerConfig& cfg, Rng& rng);

}  // namespace tabletop::grasp
