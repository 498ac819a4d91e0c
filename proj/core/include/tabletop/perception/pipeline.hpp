#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tabletop/perception/cloud.hpp"

namespace tabletop::perception {

struct FusionConfig {
  double assoc_dist = 0.05;  // centroid distance that merges two views
};

struct PerceptionConfig {
  std::vector<CameraModel> cameras;
  NoiseConfig noise;
  DetectorConfig detector;
  FusionConfig fusion;
  DenoiseParams denoise;
};

// JSON round trip for the whole rig: cameras with intrinsics/extrinsics plus
// the detector, fusion, and denoise knobs.
PerceptionConfig load_rig_text(const std::string& text);
PerceptionConfig load_rig_file(const std::filesystem::path& path);
std::string serialize_rig(const PerceptionConfig& config);

// Multi-view lookup of one named object: render, detect in every view,
// deproject, fuse, pick the highest-logit group, denoise, measure.
class Pipeline {
 public:
  explicit Pipeline(PerceptionConfig config) : config_(std::move(config)) {}

  const PerceptionConfig& config() const { return config_; }

  // Rendered views for this world revision. Cached: re-rendering happens
  // only after the world changed, so repeated queries of one scene spend
  // their noise draws exactly once.
  const std::vector<RenderedView>& views(const world::WorldState& state, Rng& rng);

  // All fused candidates for the query, strongest first. Views with no
  // depth returns on the mask are skipped.
  std::vector<FusedObject> enumerate(const world::WorldState& state, std::string_view query,
                                     Rng& rng);

  // The winning candidate, denoised and measured. Throws
  // Error(VisionNotFound) when nothing usable was detected.
  FusedObject query_object(const world::WorldState& state, std::string_view query, Rng& rng);

  void invalidate_cache() { cache_.reset(); }

 private:
  PerceptionConfig config_;
  struct Cache {
    std::uint64_t revision;
    std::vector<RenderedView> views;
  };
  std::optional<Cache> cache_;
};

}  // namespace tabletop::perception
