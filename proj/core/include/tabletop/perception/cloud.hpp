#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tabletop/perception/detector.hpp"

namespace tabletop::perception {

// One detection lifted to 3D through the depth image.
struct PartialCloud {
  std::string label;
  std::string camera_id;
  int mask_index = 0;
  double logit = 0.0;
  std::vector<Eigen::Vector3d> points;  // base frame

  Eigen::Vector3d centroid() const;
};

// Throws Error(EmptyCloud) when no mask pixel has a depth return.
PartialCloud deproject_detection(const Detection& detection, const DepthImage& depth,
                                 const CameraModel& camera);

struct FusedObject {
  std::string label;       // label of the strongest contributor
  double logit_sum = 0.0;  // summed over contributors in canonical order
  std::vector<Eigen::Vector3d> points;
  Eigen::Vector3d centroid{0, 0, 0};  // bounding-box center of `points`
  Eigen::Vector3d dims{0, 0, 0};      // bounding-box extents
  std::vector<std::pair<std::string, int>> members;  // (camera_id, mask_index)
};

// Groups partial clouds whose centroids sit within `assoc_dist` of each
// other (single linkage), concatenates their points, and sums their logits.
// Members are put in canonical (camera_id, mask_index) order first, so any
// input permutation produces bit-identical results; groups are returned
// strongest first.
std::vector<FusedObject> fuse_clouds(const std::vector<PartialCloud>& clouds, double assoc_dist);

struct DenoiseParams {
  int k = 16;             // neighbors per point
  double sigma_mult = 2.0;  // keep points within mean + this * stddev
};

struct DenoiseResult {
  std::vector<Eigen::Vector3d> points;
  int removed = 0;
  // Too few points to form neighborhoods; input returned untouched.
  bool degenerate = false;
};

// Statistical outlier removal over mean k-nearest-neighbor distances.
DenoiseResult denoise_cloud(const std::vector<Eigen::Vector3d>& points,
                            const DenoiseParams& params);

// Bounding-box center and extents. Throws Error(EmptyCloud) on no points.
std::pair<Eigen::Vector3d, Eigen::Vector3d> extract_geometry(
    const std::vector<Eigen::Vector3d>& points);

// Text dump, one "x y z" line per point.
void write_cloud(const std::vector<Eigen::Vector3d>& points, const std::filesystem::path& path);
std::vector<Eigen::Vector3d> read_cloud(const std::filesystem::path& path);

}  // namespace tabletop::perception
