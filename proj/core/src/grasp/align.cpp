#include "tabletop/grasp/align.hpp"

#include <algorithm>
#include <cmath>

#include "tabletop/common/angles.hpp"

namespace tabletop::grasp {

MaskMoments compute_moments(const MaskImage& mask) {
  MaskMoments m;
  double sum_u = 0.0;
  double sum_v = 0.0;
  for (int v = 0; v < mask.height(); ++v) {
    for (int u = 0; u < mask.width(); ++u) {
      if (mask.at(u, v) == 0) continue;
      m.area += 1.0;
      sum_u += u;
      sum_v += v;
    }
  }
  if (m.area == 0.0) return m;
  m.cx = sum_u / m.area;
  m.cy = sum_v / m.area;
  double mu20 = 0.0;
  double mu02 = 0.0;
  double mu11 = 0.0;
  for (int v = 0; v < mask.height(); ++v) {
    for (int u = 0; u < mask.width(); ++u) {
      if (mask.at(u, v) == 0) continue;
      const double du = u - m.cx;
      const double dv = v - m.cy;
      mu20 += du * du;
      mu02 += dv * dv;
      mu11 += du * dv;
    }
  }
  double axis = rad2deg(0.5 * std::atan2(2.0 * mu11, mu20 - mu02));
  if (axis >= 90.0) axis -= 180.0;
  if (axis < -90.0) axis += 180.0;
  m.axis_deg = axis;
  return m;
}

double mask_iou(const MaskImage& a, const MaskImage& b) {
  const int w = std::max(a.width(), b.width());
  const int h = std::max(a.height(), b.height());
  long long inter = 0;
  long long uni = 0;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const bool in_a = a.in_bounds(u, v) && a.at(u, v) != 0;
      const bool in_b = b.in_bounds(u, v) && b.at(u, v) != 0;
      if (in_a && in_b) ++inter;
      if (in_a || in_b) ++uni;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

MaskImage warp_mask(const MaskImage& source, const MaskAlignment& align, int width, int height,
                    std::optional<std::pair<double, double>> pivot) {
  MaskImage out(width, height, 0);
  double px = 0.0;
  double py = 0.0;
  if (pivot.has_value()) {
    px = pivot->first;
    py = pivot->second;
  } else {
    const MaskMoments sm = compute_moments(source);
    if (sm.area == 0.0) return out;
    px = sm.cx;
    py = sm.cy;
  }
  if (align.scale <= 0.0) return out;
  // Inverse mapping keeps the warp hole-free at any scale.
  const double rad = deg2rad(align.rotation_deg);
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const double dx = u - align.tx;
      const double dy = v - align.ty;
      const double su = px + (c * dx + s * dy) / align.scale;
      const double sv = py + (-s * dx + c * dy) / align.scale;
      const int iu = static_cast<int>(std::lround(su));
      const int iv = static_cast<int>(std::lround(sv));
      if (source.in_bounds(iu, iv) && source.at(iu, iv) != 0) out.at(u, v) = 1;
    }
  }
  return out;
}

void apply_alignment(const MaskAlignment& align, const MaskMoments& source_moments, double u,
                     double v, double& out_u, double& out_v) {
  const double rad = deg2rad(align.rotation_deg);
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const double du = u - source_moments.cx;
  const double dv = v - source_moments.cy;
  out_u = align.tx + align.scale * (c * du - s * dv);
  out_v = align.ty + align.scale * (s * du + c * dv);
}

std::optional<MaskAlignment> align_masks(const MaskImage& source, const MaskImage& target,
                                         double min_iou) {
  const MaskMoments sm = compute_moments(source);
  const MaskMoments tm = compute_moments(target);
  if (sm.area == 0.0 || tm.area == 0.0) return std::nullopt;

  MaskAlignment base;
  base.tx = tm.cx;
  base.ty = tm.cy;
  base.scale = std::sqrt(tm.area / sm.area);

  // Principal axes only fix the rotation up to 180 degrees; try both and
  // keep whichever overlaps the target better.
  MaskAlignment best;
  double best_iou = -1.0;
  for (const double flip : {0.0, 180.0}) {
    MaskAlignment cand = base;
    cand.rotation_deg = normalize_deg(tm.axis_deg - sm.axis_deg + flip);
    const MaskImage warped = warp_mask(source, cand, target.width(), target.height());
    cand.iou = mask_iou(warped, target);
    if (cand.iou > best_iou) {
      best_iou = cand.iou;
      best = cand;
    }
  }
  if (best_iou < min_iou) return std::nullopt;
  return best;
}

}  // namespace tabletop::grasp
