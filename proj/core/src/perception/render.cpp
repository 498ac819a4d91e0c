#include "tabletop/perception/render.hpp"

#include <algorithm>

#include "tabletop/world/geometry.hpp"

namespace tabletop::perception {

RenderedView render_view(const world::WorldState& state, const CameraModel& camera,
                         const NoiseConfig& noise, Rng& rng) {
  RenderedView view;
  view.camera = camera;
  view.depth = DepthImage(camera.width, camera.height, 0.0);
  view.ids = IndexImage(camera.width, camera.height, -1);

  const Eigen::Vector3d origin = camera.origin();
  const Eigen::Matrix3d rot = camera.extrinsics.linear();

  for (int v = 0; v < camera.height; ++v) {
    for (int u = 0; u < camera.width; ++u) {
      const Eigen::Vector3d dir = rot * camera.pixel_dir(u, v);
      double best = 0.0;
      int best_id = -1;
      for (size_t i = 0; i < state.objects.size(); ++i) {
        const auto t = world::ray_hit(state.objects[i], origin, dir);
        if (!t) continue;
        view.pixels_hit[static_cast<int>(i)] += 1;
        if (best_id < 0 || *t < best) {
          best = *t;
          best_id = static_cast<int>(i);
        }
      }
      if (best_id >= 0) {
        view.pixels_visible[best_id] += 1;
        double d = best;  // ray parameter equals z-depth for unit-z dirs
        if (noise.depth_sigma > 0.0) d = std::max(1e-6, d + rng.normal(0.0, noise.depth_sigma));
        view.depth.at(u, v) = d;
        view.ids.at(u, v) = best_id;
      }
    }
  }
  return view;
}

std::vector<RenderedView> render_views(const world::WorldState& state,
                                       const std::vector<CameraModel>& cameras,
                                       const NoiseConfig& noise, Rng& rng) {
  std::vector<RenderedView> views;
  views.reserve(cameras.size());
  for (const auto& cam : cameras) views.push_back(render_view(state, cam, noise, rng));
  return views;
}

}  // namespace tabletop::perception
