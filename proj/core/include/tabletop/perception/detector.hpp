#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tabletop/common/rng.hpp"
#include "tabletop/perception/render.hpp"

namespace tabletop::perception {

// Stand-in for an open-vocabulary detector + segmenter. It works from the
// renderer's ground-truth id image and converts visibility into confidence,
// with optional label confusion and misses to emulate real failure modes.
struct DetectorConfig {
  double conf_threshold = 0.35;  // detections below this logit are dropped
  double base_logit = 0.9;       // logit of a fully visible object
  double miss_rate = 0.0;        // chance a visible object is not proposed
  double confusion_rate = 0.0;   // chance a query lands on its paired label
  std::vector<std::pair<std::string, std::string>> confusions = {{"scoop", "spatula"}};
};

struct Detection {
  std::string label;      // what the query asked for
  std::string camera_id;
  int mask_index = 0;     // position among this view's detections
  MaskImage mask;
  double logit = 0.0;
};

// All masks in this view matching `query`. The logit is base_logit times the
// unoccluded fraction; fully hidden objects and sub-threshold detections are
// dropped. Random draws happen in a fixed order (confusion first, then one
// miss draw per candidate), keyed only by the rng state.
std::vector<Detection> detect(const RenderedView& view, const world::WorldState& state,
                              std::string_view query, const DetectorConfig& config, Rng& rng);

}  // namespace tabletop::perception
