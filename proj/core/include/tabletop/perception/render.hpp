#pragma once

#include <map>
#include <vector>

#include "tabletop/common/image.hpp"
#include "tabletop/common/rng.hpp"
#include "tabletop/perception/camera.hpp"
#include "tabletop/world/types.hpp"

namespace tabletop::perception {

struct NoiseConfig {
  double depth_sigma = 0.0;  // gaussian depth error in meters
};

struct RenderedView {
  CameraModel camera;
  DepthImage depth;   // z-depth in meters, 0 where nothing is hit
  IndexImage ids;     // index into WorldState::objects, -1 background
  // Per-object pixel counts: all pixels whose ray meets the object, and the
  // subset where the object is the nearest hit. Their ratio is how much of
  // the object this view actually sees.
  std::map<int, int> pixels_hit;
  std::map<int, int> pixels_visible;

  double visible_fraction(int object_index) const {
    auto hit = pixels_hit.find(object_index);
    if (hit == pixels_hit.end() || hit->second == 0) return 0.0;
    auto vis = pixels_visible.find(object_index);
    return static_cast<double>(vis == pixels_visible.end() ? 0 : vis->second) / hit->second;
  }
};

// Analytic ray casting against the scene's primitives. Depth noise is
// applied per hit pixel, in row-major pixel order, so identical seeds give
// identical images.
RenderedView render_view(const world::WorldState& state, const CameraModel& camera,
                         const NoiseConfig& noise, Rng& rng);

std::vector<RenderedView> render_views(const world::WorldState& state,
                                       const std::vector<CameraModel>& cameras,
                                       const NoiseConfig& noise, Rng& rng);

}  // namespace tabletop::perception
