#include "tabletop/world/types.hpp"

#include <algorithm>

namespace tabletop::world {

std::string_view tool_class_name(ToolClass c) {
  switch (c) {
    case ToolClass::Scoop: return "scoop";
    case ToolClass::Flattener: return "flattener";
    case ToolClass::Whisk: return "whisk";
    case ToolClass::Hammer: return "hammer";
    case ToolClass::Spatula: return "spatula";
    case ToolClass::Other: return "other";
  }
  return "other";
}

std::optional<ToolClass> tool_class_from_name(std::string_view name) {
  if (name == "scoop") return ToolClass::Scoop;
  if (name == "flattener") return ToolClass::Flattener;
  if (name == "whisk") return ToolClass::Whisk;
  if (name == "hammer") return ToolClass::Hammer;
  if (name == "spatula") return ToolClass::Spatula;
  if (name == "other") return ToolClass::Other;
  return std::nullopt;
}

std::string_view category_name(Category c) {
  switch (c) {
    case Category::Rigid: return "rigid";
    case Category::Granular: return "granular";
    case Category::Dough: return "dough";
    case Category::Container: return "container";
    case Category::Pointed: return "pointed";
  }
  return "rigid";
}

std::optional<Category> category_from_name(std::string_view name) {
  if (name == "rigid") return Category::Rigid;
  if (name == "granular") return Category::Granular;
  if (name == "dough") return Category::Dough;
  if (name == "container") return Category::Container;
  if (name == "pointed") return Category::Pointed;
  return std::nullopt;
}

const SceneObject* WorldState::find(std::string_view name) const {
  auto it = std::find_if(objects.begin(), objects.end(),
                         [&](const SceneObject& o) { return o.name == name; });
  return it == objects.end() ? nullptr : &*it;
}

SceneObject* WorldState::find(std::string_view name) {
  auto it = std::find_if(objects.begin(), objects.end(),
                         [&](const SceneObject& o) { return o.name == name; });
  return it == objects.end() ? nullptr : &*it;
}

int WorldState::index_of(std::string_view name) const {
  for (size_t i = 0; i < objects.size(); ++i)
    if (objects[i].name == name) return static_cast<int>(i);
  return -1;
}

namespace {
const ObjectEffects kNoEffects{};
}

const ObjectEffects& WorldState::effects_of(std::string_view name) const {
  auto it = effects.find(std::string(name));
  return it == effects.end() ? kNoEffects : it->second;
}

ObjectEffects& WorldState::effects_of(std::string_view name) {
  return effects[std::string(name)];
}

std::optional<std::string> WorldState::container_of(std::string_view name) const {
  for (const auto& [holder, fx] : effects) {
    if (fx.contains.count(std::string(name))) return holder;
  }
  return std::nullopt;
}

Pose default_home_pose() {
  Pose p;
  p.position = {0.40, 0.0, 0.35};
  p.rpy_deg = {0, 0, 0};
  return p;
}

}  // namespace tabletop::world
