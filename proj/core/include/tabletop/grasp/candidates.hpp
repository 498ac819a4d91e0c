#pragma once

#include <filesystem>
#include <vector>

#include "tabletop/common/image.hpp"

namespace tabletop::grasp {

// One antipodal top-down grasp hypothesis on a mask. The angle is the jaw
// closing direction in image coordinates (degrees from +u toward +v); width
// is the masked extent along that direction in meters.
struct GraspCandidate {
  int u = 0;
  int v = 0;
  double angle_deg = 0.0;
  double width_m = 0.0;
  double score = 0.0;

  bool operator==(const GraspCandidate&) const = default;
};

struct CandidateConfig {
  int grid_stride = 4;
  int num_angles = 8;           // 0, 22.5, ..., 157.5 degrees
  double max_width_m = 0.08;    // jaw opening limit
};

// Scores every stride-th mask pixel by its distance to the mask boundary
// (normalized to [0, 1]) and pairs it with the narrowest feasible jaw angle.
// Pixels whose narrowest masked extent exceeds the jaw limit are dropped.
// Sorted best-first; ties break on (v, u, angle).
std::vector<GraspCandidate> generate_grasps(const MaskImage& mask, double meters_per_pixel,
                                            const CandidateConfig& config = {});

// Masked extent through (u, v) along angle_deg, in pixels (counts the
// contiguous run of mask pixels through the point in both directions).
int masked_extent_px(const MaskImage& mask, int u, int v, double angle_deg);

// Normalized boundary-distance field used for scoring; background is 0.
Image<double> grasp_quality_field(const MaskImage& mask);

// Writes the quality field as an 8-bit grayscale heatmap.
void write_heatmap(const Image<double>& field, const std::filesystem::path& path);

}  // namespace tabletop::grasp
