#include "tabletop/perception/detector.hpp"

namespace tabletop::perception {

namespace {

// The label this query resolves to after a possible confusion draw. A draw
// is only spent when the query has a confusable partner that is actually in
// the scene.
std::string resolve_query(const world::WorldState& state, std::string_view query,
                          const DetectorConfig& config, Rng& rng) {
  if (config.confusion_rate <= 0.0) return std::string(query);
  for (const auto& [a, b] : config.confusions) {
    const bool forward = (query == a);
    const bool backward = (query == b);
    if (!forward && !backward) continue;
    const std::string& partner = forward ? b : a;
    if (state.index_of(partner) < 0) continue;
    if (rng.uniform() < config.confusion_rate) return partner;
    return std::string(query);
  }
  return std::string(query);
}

}  // namespace

std::vector<Detection> detect(const RenderedView& view, const world::WorldState& state,
                              std::string_view query, const DetectorConfig& config, Rng& rng) {
  std::vector<Detection> out;
  const std::string target = resolve_query(state, query, config, rng);
  const int index = state.index_of(target);
  if (index < 0) return out;

  const double fraction = view.visible_fraction(index);
  if (fraction <= 0.0) return out;
  if (config.miss_rate > 0.0 && rng.uniform() < config.miss_rate) return out;

  const double logit = config.base_logit * fraction;
  if (logit < config.conf_threshold) return out;

  Detection det;
  det.label = std::string(query);
  det.camera_id = view.camera.id;
  det.mask_index = 0;
  det.logit = logit;
  det.mask = MaskImage(view.ids.width(), view.ids.height(), 0);
  for (int y = 0; y < view.ids.height(); ++y)
    for (int x = 0; x < view.ids.width(); ++x)
      if (view.ids.at(x, y) == index) det.mask.at(x, y) = 1;
  out.push_back(std::move(det));
  return out;
}

}  // namespace tabletop::perception
