#include "tabletop/perception/cloud.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "tabletop/common/errors.hpp"
#include "tabletop/common/strings.hpp"

namespace tabletop::perception {

Eigen::Vector3d PartialCloud::centroid() const {
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  for (const auto& p : points) acc += p;
  return acc / static_cast<double>(points.size());
}

PartialCloud deproject_detection(const Detection& detection, const DepthImage& depth,
                                 const CameraModel& camera) {
  PartialCloud cloud;
  cloud.label = detection.label;
  cloud.camera_id = detection.camera_id;
  cloud.mask_index = detection.mask_index;
  cloud.logit = detection.logit;
  for (int v = 0; v < detection.mask.height(); ++v) {
    for (int u = 0; u < detection.mask.width(); ++u) {
      if (!detection.mask.at(u, v)) continue;
      const double d = depth.at(u, v);
      if (d <= 0.0) continue;
      cloud.points.push_back(camera.deproject(u, v, d));
    }
  }
  if (cloud.points.empty())
    throw Error(ErrorCode::EmptyCloud,
                "mask from camera '" + detection.camera_id + "' has no depth returns");
  return cloud;
}

namespace {

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

std::vector<FusedObject> fuse_clouds(const std::vector<PartialCloud>& clouds, double assoc_dist) {
  if (clouds.empty()) return {};

  // canonical input order makes the grouping permutation-invariant
  std::vector<int> order(clouds.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ca = clouds[a];
    const auto& cb = clouds[b];
    return std::tie(ca.camera_id, ca.mask_index, ca.label) <
           std::tie(cb.camera_id, cb.mask_index, cb.label);
  });

  std::vector<Eigen::Vector3d> centroids(order.size());
  for (size_t i = 0; i < order.size(); ++i) centroids[i] = clouds[order[i]].centroid();

  std::vector<int> parent(order.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (size_t i = 0; i < order.size(); ++i)
    for (size_t j = i + 1; j < order.size(); ++j)
      if ((centroids[i] - centroids[j]).norm() <= assoc_dist) {
        const int ri = find_root(parent, static_cast<int>(i));
        const int rj = find_root(parent, static_cast<int>(j));
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }

  std::map<int, std::vector<int>> groups;  // root -> canonical positions
  for (size_t i = 0; i < order.size(); ++i)
    groups[find_root(parent, static_cast<int>(i))].push_back(static_cast<int>(i));

  std::vector<FusedObject> fused;
  for (const auto& [root, members] : groups) {
    (void)root;
    FusedObject obj;
    double best_logit = -1.0;
    for (int pos : members) {
      const PartialCloud& c = clouds[order[pos]];
      obj.logit_sum += c.logit;
      obj.points.insert(obj.points.end(), c.points.begin(), c.points.end());
      obj.members.emplace_back(c.camera_id, c.mask_index);
      if (c.logit > best_logit || (c.logit == best_logit && c.label < obj.label)) {
        best_logit = c.logit;
        obj.label = c.label;
      }
    }
    std::tie(obj.centroid, obj.dims) = extract_geometry(obj.points);
    fused.push_back(std::move(obj));
  }

  std::sort(fused.begin(), fused.end(), [](const FusedObject& a, const FusedObject& b) {
    if (a.logit_sum != b.logit_sum) return a.logit_sum > b.logit_sum;
    if (a.label != b.label) return a.label < b.label;
    return a.members < b.members;
  });
  return fused;
}

DenoiseResult denoise_cloud(const std::vector<Eigen::Vector3d>& points,
                            const DenoiseParams& params) {
  DenoiseResult result;
  const int n = static_cast<int>(points.size());
  if (n <= params.k + 1) {
    result.points = points;
    result.degenerate = true;
    return result;
  }

  // Mean distance to the k nearest neighbors. A voxel grid with expanding
  // shell search keeps this exact but far below the brute-force n^2 cost on
  // the multi-thousand-point clouds large objects produce.
  Eigen::Vector3d lo = points.front();
  Eigen::Vector3d hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Eigen::Vector3d span = hi - lo;
  const double max_span = std::max({span.x(), span.y(), span.z(), 1e-9});
  // Aim for a handful of points per cell.
  const double cell = std::max(max_span * std::cbrt(8.0 / n), 1e-9);
  const auto cell_of = [&](const Eigen::Vector3d& p) {
    return std::array<int, 3>{static_cast<int>(std::floor((p.x() - lo.x()) / cell)),
                              static_cast<int>(std::floor((p.y() - lo.y()) / cell)),
                              static_cast<int>(std::floor((p.z() - lo.z()) / cell))};
  };
  std::map<std::array<int, 3>, std::vector<int>> grid;
  for (int i = 0; i < n; ++i) grid[cell_of(points[i])].push_back(i);
  const int max_ring = static_cast<int>(std::ceil(max_span / cell)) + 1;

  std::vector<double> mean_dist(n);
  std::vector<double> dists;
  for (int i = 0; i < n; ++i) {
    dists.clear();
    const std::array<int, 3> c = cell_of(points[i]);
    double kth = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring <= max_ring; ++ring) {
      // Shells already closer than the current kth distance cannot improve.
      if (static_cast<int>(dists.size()) >= params.k && (ring - 1) * cell > kth) break;
      for (int dz = -ring; dz <= ring; ++dz) {
        for (int dy = -ring; dy <= ring; ++dy) {
          for (int dx = -ring; dx <= ring; ++dx) {
            if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
            const auto it = grid.find({c[0] + dx, c[1] + dy, c[2] + dz});
            if (it == grid.end()) continue;
            for (int j : it->second) {
              if (j == i) continue;
              dists.push_back((points[i] - points[j]).norm());
            }
          }
        }
      }
      if (static_cast<int>(dists.size()) >= params.k) {
        std::nth_element(dists.begin(), dists.begin() + params.k - 1, dists.end());
        kth = dists[params.k - 1];
      }
    }
    double acc = 0.0;
    for (int j = 0; j < params.k; ++j) acc += dists[j];
    mean_dist[i] = acc / params.k;
  }

  double mean = 0.0;
  for (double d : mean_dist) mean += d;
  mean /= n;
  double var = 0.0;
  for (double d : mean_dist) var += (d - mean) * (d - mean);
  const double stddev = std::sqrt(var / n);
  const double cutoff = mean + params.sigma_mult * stddev;

  for (int i = 0; i < n; ++i) {
    if (mean_dist[i] <= cutoff)
      result.points.push_back(points[i]);
    else
      result.removed += 1;
  }
  if (result.points.empty()) {
    result.points = points;
    result.removed = 0;
    result.degenerate = true;
  }
  return result;
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> extract_geometry(
    const std::vector<Eigen::Vector3d>& points) {
  if (points.empty()) throw Error(ErrorCode::EmptyCloud, "no points to measure");
  Eigen::Vector3d lo = points.front();
  Eigen::Vector3d hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {0.5 * (lo + hi), hi - lo};
}

void write_cloud(const std::vector<Eigen::Vector3d>& points, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  for (const auto& p : points)
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z())
        << '\n';
}

std::vector<Eigen::Vector3d> read_cloud(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<Eigen::Vector3d> points;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x >> y >> z))
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(lineno) + ": expected 'x y z'");
    points.emplace_back(x, y, z);
  }
  return points;
}

}  // namespace tabletop::perception
