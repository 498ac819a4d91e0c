#include "tabletop/harness/scripted.hpp"

#include <algorithm>

#include "tabletop/agents/agents.hpp"
#include "tabletop/common/errors.hpp"
#include "tabletop/common/strings.hpp"
#include "tabletop/dsl/actions.hpp"
#include "tabletop/fixtures/fixtures.hpp"

namespace tabletop::harness {

namespace {

using plan::HighLevelStep;
using plan::LocationExpr;

// One planned step plus the gripper actions that carry it out. Tool pickups
// leave the expansion empty: those go through the grasp planner, and only
// need a database-model choice.
struct ScriptedStep {
  HighLevelStep step;
  std::string expansion;
  std::string tool_choice;
};

std::string fmt(double v) { return format_double(v); }

std::string go(const LocationExpr& loc, double x, double y, double z) {
  return "Go-to: " + plan::serialize_location(loc) + " + (" + fmt(x) + ", " + fmt(y) + ", " +
         fmt(z) + ") cm\n";
}

std::string grip(int state) { return "Grasp: " + std::to_string(state) + "\n"; }

std::string tilt(double roll, double pitch, double yaw) {
  return "Tilt:(" + fmt(roll) + ", " + fmt(pitch) + ", " + fmt(yaw) + ")\n";
}

ScriptedStep tool_pickup(const std::string& tool, const std::string& db_choice) {
  return {{"pickup", LocationExpr::current_of(tool), tool, ""}, "", db_choice};
}

// Straight grab from above: hover, drop to the top of the object, close,
// lift. The 2 cm touch offset reaches the top of the tomato's 2 cm radius.
ScriptedStep plain_pickup(const std::string& object, double top_above_center_cm) {
  const LocationExpr at = LocationExpr::current_of(object);
  ScriptedStep s{{"pickup", at, object, ""}, "", ""};
  s.expansion = go(at, 0, 0, 10) + go(at, 0, 0, top_above_center_cm) + grip(1) + go(at, 0, 0, 10);
  return s;
}

// Sweep the scoop head through the pile, then lift and tip the head up past
// the fill threshold. The head sits 4 to 5 cm behind the wrist, so a wrist
// offset of +3 cm parks it just past the pile's center.
ScriptedStep scoop_material(const std::string& material, const std::string& tool) {
  const LocationExpr at = LocationExpr::current_of(material);
  ScriptedStep s{{"scoop", at, material, tool}, "", ""};
  s.expansion = go(at, 12, 0, 1.3) + go(at, 3, 0, 1.3) + go(at, 3, 0, 12) + tilt(0, 35, 0);
  return s;
}

// Tip the load out over the target. The downward-tilted head lands roughly
// 4 cm behind the wrist, so +3.2 cm centers the drop over the anchor.
ScriptedStep pour_onto(const std::string& target, const std::string& material,
                       const std::string& tool) {
  const LocationExpr at = LocationExpr::current_of(target);
  ScriptedStep s{{"pour", at, material, tool}, "", ""};
  s.expansion = go(at, 3.2, 0, 12) + tilt(0, -35, 0);
  return s;
}

// Press straight down until the head is within the flattening clearance of
// the table, then retreat.
ScriptedStep flatten_dough(const std::string& dough, const std::string& tool) {
  const LocationExpr at = LocationExpr::current_of(dough);
  ScriptedStep s{{"flatten", at, dough, tool}, "", ""};
  s.expansion = go(at, 0, 0, 12) + go(at, 0, 0, 4) + go(at, 0, 0, 12);
  return s;
}

// Side-to-side strokes with the whisk head inside the bowl: five strokes
// give four direction reversals, one more than the finish threshold.
ScriptedStep whisk_bowl(const std::string& bowl, const std::string& tool) {
  const LocationExpr at = LocationExpr::current_of(bowl);
  ScriptedStep s{{"whisk", at, bowl, tool}, "", ""};
  s.expansion = go(at, 4.7, 1.5, 2.55) + go(at, 4.7, -1.5, 2.55) + go(at, 4.7, 1.5, 2.55) +
                go(at, 4.7, -1.5, 2.55) + go(at, 4.7, 1.5, 2.55) + go(at, 4.7, 1.5, 12);
  return s;
}

// Three jabs; the spike tip hangs 8 cm under the wrist, so the low point
// drives it through the flattened sheet without touching the table.
ScriptedStep poke_dough(const std::string& dough, const std::string& tool) {
  const LocationExpr at = LocationExpr::current_of(dough);
  ScriptedStep s{{"poke", at, dough, tool}, "", ""};
  s.expansion = go(at, 0, 0, 10) + go(at, 0, 0, 7.9) + go(at, 0, 0, 10) + go(at, 0, 0, 7.9) +
                go(at, 0, 0, 10) + go(at, 0, 0, 7.9) + go(at, 0, 0, 12);
  return s;
}

// Put the held object down, released a little above its resting height.
ScriptedStep put_down(const std::string& verb, const LocationExpr& where,
                      const std::string& object, double dx_cm, double drop_cm) {
  ScriptedStep s{{verb, where, object, ""}, "", ""};
  s.expansion = go(where, dx_cm, 0, drop_cm) + grip(0);
  return s;
}

std::vector<ScriptedStep> build_script(const Experiment& exp) {
  if (exp.name == "place-next-to") {
    return {plain_pickup("tomato", 2),
            put_down("place", LocationExpr::current_of("bowl"), "tomato", 7.5, 8)};
  }
  if (exp.name == "place-within") {
    return {plain_pickup("tomato", 2),
            put_down("insert", LocationExpr::current_of("bowl"), "tomato", 0, 8)};
  }
  if (exp.name == "scoop-candy") {
    return {tool_pickup("scoop", "scoop"), scoop_material("candies", "scoop")};
  }
  if (exp.name == "flatten-dough") {
    return {tool_pickup("flattener", "flattener"), flatten_dough("dough", "flattener")};
  }
  if (exp.name == "whisk-bowl") {
    return {tool_pickup("whisk", "whisk"), whisk_bowl("bowl", "whisk")};
  }
  if (exp.name == "scoop-into-bowl") {
    return {tool_pickup("scoop", "scoop"), scoop_material("candies", "scoop"),
            pour_onto("bowl", "candies", "scoop")};
  }
  if (exp.name == "flatten-poke") {
    return {tool_pickup("flattener", "flattener"), flatten_dough("dough", "flattener"),
            put_down("place", LocationExpr::original_of("flattener"), "flattener", 0, 4.5),
            tool_pickup("poker", "none"), poke_dough("dough", "poker")};
  }
  if (exp.name == "scoop-onto-dough") {
    return {tool_pickup("flattener", "flattener"), flatten_dough("dough", "flattener"),
            put_down("place", LocationExpr::original_of("flattener"), "flattener", 0, 4.5),
            tool_pickup("scoop", "scoop"), scoop_material("candies", "scoop"),
            pour_onto("dough", "candies", "scoop")};
  }
  throw Error(ErrorCode::ValidationError, "no script for experiment '" + exp.name + "'");
}

// The objects a step's expansion request will carry geometry for: location
// anchor, object, tool, deduplicated. Mirrors the executor's lookups.
std::vector<std::string> referenced_names(const HighLevelStep& step) {
  std::vector<std::string> out;
  auto add = [&out](const std::string& name) {
    if (!name.empty() && std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  };
  if (step.location.kind != plan::LocationKind::Home) add(step.location.object);
  add(step.object);
  add(step.tool);
  return out;
}

}  // namespace

void install_policy(agents::ScriptedBackend& backend, const Experiment& exp) {
  std::vector<std::string> scene_names;
  for (const auto& obj : exp.base_scene.objects) scene_names.push_back(obj.name);

  std::string comp;
  for (const auto& entry : exp.relevant) {
    comp += entry.name + (entry.is_tool ? ": tool" : ": not tool") + "\n";
  }
  backend.add(agents::Role::SceneComprehension,
              agents::AgentSuite::comprehension_key(exp.query, scene_names), comp);

  const std::vector<ScriptedStep> script = build_script(exp);
  std::vector<HighLevelStep> steps;
  for (const auto& s : script) steps.push_back(s.step);
  backend.add(agents::Role::OverallPlanner, agents::AgentSuite::plan_key(exp.query, exp.relevant),
              plan::serialize_plan(steps));

  std::vector<std::string> db_names;
  for (const auto& tool : fixtures::db_tool_catalog()) db_names.push_back(tool.name);

  std::optional<HighLevelStep> prev;
  bool holding = false;
  for (const auto& s : script) {
    if (plan::requires_tool_pickup(s.step, exp.relevant)) {
      backend.add(agents::Role::ToolMapper,
                  agents::AgentSuite::tool_key(s.step.object, exp.query, db_names), s.tool_choice);
      holding = true;
    } else {
      agents::GeometryMap geometry;
      for (const auto& name : referenced_names(s.step)) geometry[name] = {};
      backend.add(agents::Role::StepPlanner,
                  agents::AgentSuite::step_key(s.step, prev, geometry, holding), s.expansion);
      for (const auto& action : dsl::parse_sequence(s.expansion)) {
        if (const auto* g = std::get_if<dsl::Grasp>(&action)) holding = (g->state == 1);
      }
    }
    prev = s.step;
  }
}

std::shared_ptr<agents::ScriptedBackend> make_scripted_backend(
    const std::vector<Experiment>& experiments) {
  auto backend = std::make_shared<agents::ScriptedBackend>();
  for (const auto& exp : experiments) install_policy(*backend, exp);
  return backend;
}

}  // namespace tabletop::harness
