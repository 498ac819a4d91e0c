#include "tabletop/grasp/candidates.hpp"

#include <algorithm>
#include <cmath>

#include "tabletop/common/angles.hpp"
#include "tabletop/common/edt.hpp"
#include "tabletop/common/errors.hpp"

namespace tabletop::grasp {

int masked_extent_px(const MaskImage& mask, int u, int v, double angle_deg) {
  if (!mask.in_bounds(u, v) || mask.at(u, v) == 0) return 0;
  const double rad = deg2rad(angle_deg);
  const double du = std::cos(rad);
  const double dv = std::sin(rad);
  int count = 1;
  for (int sign : {1, -1}) {
    for (int step = 1;; ++step) {
      const int su = static_cast<int>(std::lround(u + sign * step * du));
      const int sv = static_cast<int>(std::lround(v + sign * step * dv));
      if (!mask.in_bounds(su, sv) || mask.at(su, sv) == 0) break;
      ++count;
    }
  }
  return count;
}

Image<double> grasp_quality_field(const MaskImage& mask) {
  Image<double> sq = squared_distance_transform(mask);
  Image<double> field(mask.width(), mask.height(), 0.0);
  double max_dist = 0.0;
  for (size_t i = 0; i < sq.data().size(); ++i) {
    field.data()[i] = std::sqrt(sq.data()[i]);
    max_dist = std::max(max_dist, field.data()[i]);
  }
  if (max_dist > 0.0) {
    for (double& p : field.data()) p /= max_dist;
  }
  return field;
}

std::vector<GraspCandidate> generate_grasps(const MaskImage& mask, double meters_per_pixel,
                                            const CandidateConfig& config) {
  if (config.grid_stride < 1) throw Error(ErrorCode::ValidationError, "grid stride must be positive");
  if (config.num_angles < 1) throw Error(ErrorCode::ValidationError, "need at least one jaw angle");
  if (!(meters_per_pixel > 0.0)) {
    throw Error(ErrorCode::ValidationError, "meters_per_pixel must be positive");
  }
  const Image<double> field = grasp_quality_field(mask);
  const double angle_step = 180.0 / config.num_angles;

  std::vector<GraspCandidate> out;
  for (int v = 0; v < mask.height(); v += config.grid_stride) {
    for (int u = 0; u < mask.width(); u += config.grid_stride) {
      if (mask.at(u, v) == 0) continue;
      // Jaw closes along the narrowest direction through this pixel.
      double best_width = 0.0;
      double best_angle = 0.0;
      bool found = false;
      for (int a = 0; a < config.num_angles; ++a) {
        const double angle = a * angle_step;
        const double width = masked_extent_px(mask, u, v, angle) * meters_per_pixel;
        if (!found || width < best_width) {
          best_width = width;
          best_angle = angle;
          found = true;
        }
      }
      if (best_width > config.max_width_m) continue;
      GraspCandidate cand;
      cand.u = u;
      cand.v = v;
      cand.angle_deg = best_angle;
      cand.width_m = best_width;
      cand.score = field.at(u, v);
      out.push_back(cand);
    }
  }
  std::sort(out.begin(), out.end(), [](const GraspCandidate& a, const GraspCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.v != b.v) return a.v < b.v;
    if (a.u != b.u) return a.u < b.u;
    return a.angle_deg < b.angle_deg;
  });
  return out;
}

void write_heatmap(const Image<double>& field, const std::filesystem::path& path) {
  write_pgm_scaled(field, path);
}

}  // namespace tabletop::grasp
