#pragma once

#include <optional>

#include "tabletop/common/image.hpp"

namespace tabletop::grasp {

// Centroid and second-order moment summary of a binary mask.
struct MaskMoments {
  double area = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double axis_deg = 0.0;  // principal axis direction in [-90, 90)
};

MaskMoments compute_moments(const MaskImage& mask);

// Similarity transform mapping source-mask pixels onto the target image:
// rotate by rotation_deg about the source centroid, scale, then move the
// centroid to (tx, ty).
struct MaskAlignment {
  double tx = 0.0;
  double ty = 0.0;
  double rotation_deg = 0.0;
  double scale = 1.0;
  double iou = 0.0;
};

// Overlap of two same-purpose masks on a shared canvas (sizes may differ;
// out-of-bounds pixels count as background).
double mask_iou(const MaskImage& a, const MaskImage& b);

// Applies the alignment to every foreground pixel of source, rasterizing
// onto a canvas of the given size. The rotation pivot defaults to the
// source's own centroid; pass an explicit pivot to warp a secondary mask
// (e.g. a graspable region) with the transform computed from its parent.
MaskImage warp_mask(const MaskImage& source, const MaskAlignment& align, int width, int height,
                    std::optional<std::pair<double, double>> pivot = std::nullopt);

// Moment-based similarity registration of source onto target. Scale comes
// from the area ratio, rotation from the principal axes (the 180-degree
// ambiguity is settled by IoU). Returns nullopt when either mask is empty or
// the best overlap is below min_iou.
std::optional<MaskAlignment> align_masks(const MaskImage& source, const MaskImage& target,
                                         double min_iou = 0.5);

// Maps one source pixel through the alignment.
void apply_alignment(const MaskAlignment& align, const MaskMoments& source_moments, double u,
                     double v, double& out_u, double& out_v);

}  // namespace tabletop::grasp
