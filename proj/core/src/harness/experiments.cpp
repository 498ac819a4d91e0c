#include "tabletop/harness/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "tabletop/common/rng.hpp"
#include "tabletop/fixtures/fixtures.hpp"
#include "tabletop/world/actions.hpp"
#include "tabletop/world/geometry.hpp"
#include "tabletop/world/scene_io.hpp"

namespace tabletop::harness {

std::string_view category_label(TaskCategory c) {
  switch (c) {
    case TaskCategory::PickPlace: return "pick-place";
    case TaskCategory::SingleTool: return "single-tool";
    case TaskCategory::MultiTool: return "multi-tool";
  }
  return "unknown";
}

world::WorldState Experiment::make_scene(std::uint64_t seed) const {
  Rng rng(derive_seed(seed, "scene"));
  return fixtures::randomize_scene(base_scene, rng);
}

int GateLadder::score() const {
  if (!comprehension) return 0;
  if (!grounding) return 25;
  if (!milestone) return 50;
  if (!full) return 75;
  return 100;
}

bool trace_has_event(const run::ExecutionTrace& trace, std::string_view kind,
                     const std::map<std::string, std::string>& detail) {
  for (const auto& step : trace.steps) {
    for (const auto& event : step.events) {
      if (event.kind != kind) continue;
      bool all = true;
      for (const auto& [key, value] : detail) {
        const auto it = event.detail.find(key);
        if (it == event.detail.end() || it->second != value) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
  }
  return false;
}

namespace {

bool comprehension_matches(const std::vector<plan::ObjectEntry>& got,
                           const std::vector<plan::ObjectEntry>& want) {
  if (got.size() != want.size()) return false;
  auto sorted = [](std::vector<plan::ObjectEntry> v) {
    std::sort(v.begin(), v.end(),
              [](const plan::ObjectEntry& a, const plan::ObjectEntry& b) { return a.name < b.name; });
    return v;
  };
  return sorted(got) == sorted(want);
}

bool groundings_accurate(const Experiment& exp, const run::ExecutionTrace& trace,
                         const world::WorldState& initial) {
  for (const auto& entry : exp.relevant) {
    const world::SceneObject* truth = initial.find(entry.name);
    if (truth == nullptr) return false;
    const Eigen::Vector3d want = world::object_aabb(*truth).center();
    bool ok = false;
    for (const auto& rec : trace.groundings) {
      if (rec.name != entry.name) continue;
      ok = rec.found && (rec.centroid - want).norm() <= kGroundingTolerance;
      break;
    }
    if (!ok) return false;
  }
  return true;
}

bool held_by_robot(const world::WorldState& w, const std::string& name) {
  return w.robot.held.has_value() && w.robot.held->object == name;
}

// Footprints side by side: disjoint in the table plane but within 5 cm, and
// the subject neither held nor inside anything.
bool next_to(const world::WorldState& w, const std::string& subject, const std::string& anchor) {
  const world::SceneObject* a = w.find(subject);
  const world::SceneObject* b = w.find(anchor);
  if (a == nullptr || b == nullptr) return false;
  if (held_by_robot(w, subject) || w.container_of(subject).has_value()) return false;
  const world::Aabb ba = world::object_aabb(*a);
  const world::Aabb bb = world::object_aabb(*b);
  const double dx = std::max(ba.min.x() - bb.max.x(), bb.min.x() - ba.max.x());
  const double dy = std::max(ba.min.y() - bb.max.y(), bb.min.y() - ba.max.y());
  if (std::max(dx, dy) <= 0.0) return false;  // overlapping footprints
  const double gap = std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
  return gap <= 0.05;
}

bool inside(const world::WorldState& w, const std::string& item, const std::string& container) {
  const auto holder = w.container_of(item);
  return holder.has_value() && *holder == container;
}

// Settled on top of the base within the same slack the executor's own
// placement check uses.
bool rests_on(const world::WorldState& w, const std::string& item, const std::string& base) {
  const world::SceneObject* a = w.find(item);
  const world::SceneObject* b = w.find(base);
  if (a == nullptr || b == nullptr) return false;
  if (held_by_robot(w, item)) return false;
  const world::Aabb ib = world::object_aabb(*a);
  const world::Aabb bb = world::object_aabb(*b);
  if (!bb.contains_xy(a->pose.position.x(), a->pose.position.y())) return false;
  return std::abs(ib.min.z() - bb.max.z()) <= world::ActionLimits{}.pour_rest_tolerance;
}

bool grasped(const run::ExecutionTrace& t, const std::string& object) {
  return trace_has_event(t, "grasp_close", {{"object", object}});
}

bool grasped_by_handle(const run::ExecutionTrace& t, const std::string& tool) {
  return trace_has_event(t, "grasp_close", {{"object", tool}, {"in_grasp_region", "true"}});
}

Experiment make_experiment(TaskCategory category, std::string name, std::string query,
                           std::vector<plan::ObjectEntry> relevant, world::WorldState scene,
                           GateCheck milestone, GateCheck full) {
  Experiment exp;
  exp.category = category;
  exp.name = std::move(name);
  exp.query = std::move(query);
  exp.relevant = std::move(relevant);
  exp.base_scene = std::move(scene);
  exp.milestone = std::move(milestone);
  exp.full = std::move(full);
  return exp;
}

}  // namespace

GateLadder evaluate_gates(const Experiment& exp, const run::ExecutionTrace& trace) {
  GateLadder ladder;
  ladder.comprehension = comprehension_matches(trace.comprehension, exp.relevant);

  world::WorldState initial;
  world::WorldState final_state;
  try {
    initial = world::load_world_text(trace.initial_world);
    final_state = world::load_world_text(trace.final_world);
  } catch (...) {
    return ladder;  // snapshots missing or unreadable: nothing else can be judged
  }

  ladder.grounding = groundings_accurate(exp, trace, initial);
  const GateContext ctx{trace, initial, final_state};
  if (exp.milestone) ladder.milestone = exp.milestone(ctx);
  if (exp.full) ladder.full = exp.full(ctx);
  return ladder;
}

int score_trace(const Experiment& exp, const run::ExecutionTrace& trace) {
  return evaluate_gates(exp, trace).score();
}

std::vector<Experiment> default_experiments() {
  std::vector<Experiment> out;

  out.push_back(make_experiment(
      TaskCategory::PickPlace, "place-next-to", "Place the tomato next to the bowl",
      {{"bowl", false}, {"tomato", false}}, fixtures::scene_kitchen(),
      [](const GateContext& c) { return grasped(c.trace, "tomato"); },
      [](const GateContext& c) { return next_to(c.final_state, "tomato", "bowl"); }));

  out.push_back(make_experiment(
      TaskCategory::PickPlace, "place-within", "Place the tomato within the bowl",
      {{"bowl", false}, {"tomato", false}}, fixtures::scene_kitchen(),
      [](const GateContext& c) { return grasped(c.trace, "tomato"); },
      [](const GateContext& c) { return inside(c.final_state, "tomato", "bowl"); }));

  out.push_back(make_experiment(
      TaskCategory::SingleTool, "scoop-candy", "Scoop up candy",
      {{"candies", false}, {"scoop", true}}, fixtures::scene_scoop_candy(),
      [](const GateContext& c) { return grasped_by_handle(c.trace, "scoop"); },
      [](const GateContext& c) {
        return c.final_state.effects_of("scoop").contains.count("candies") > 0;
      }));

  out.push_back(make_experiment(
      TaskCategory::SingleTool, "flatten-dough", "Flatten the ball of dough",
      {{"dough", false}, {"flattener", true}}, fixtures::scene_flatten(),
      [](const GateContext& c) { return grasped_by_handle(c.trace, "flattener"); },
      [](const GateContext& c) { return c.final_state.effects_of("dough").flattened; }));

  out.push_back(make_experiment(
      TaskCategory::SingleTool, "whisk-bowl", "Whisk the empty bowl",
      {{"bowl", false}, {"whisk", true}}, fixtures::scene_whisk(),
      [](const GateContext& c) { return grasped_by_handle(c.trace, "whisk"); },
      [](const GateContext& c) { return c.final_state.effects_of("bowl").whisked; }));

  out.push_back(make_experiment(
      TaskCategory::MultiTool, "scoop-into-bowl", "Scoop the candy and place it inside a bowl",
      {{"bowl", false}, {"candies", false}, {"scoop", true}}, fixtures::scene_scoop_to_bowl(),
      [](const GateContext& c) {
        return trace_has_event(c.trace, "scoop_fill", {{"material", "candies"}, {"tool", "scoop"}});
      },
      [](const GateContext& c) { return inside(c.final_state, "candies", "bowl"); }));

  out.push_back(make_experiment(
      TaskCategory::MultiTool, "flatten-poke", "Flatten the dough and poke holes in it",
      {{"dough", false}, {"flattener", true}, {"poker", true}}, fixtures::scene_flatten_poke(),
      [](const GateContext& c) { return c.final_state.effects_of("dough").flattened; },
      [](const GateContext& c) {
        return c.final_state.effects_of("dough").flattened &&
               c.final_state.effects_of("dough").holes_poked >= 2;
      }));

  out.push_back(make_experiment(
      TaskCategory::MultiTool, "scoop-onto-dough", "Flatten the dough, and scoop candy onto it",
      {{"candies", false}, {"dough", false}, {"flattener", true}, {"scoop", true}},
      fixtures::scene_scoop_to_dough(),
      [](const GateContext& c) { return c.final_state.effects_of("dough").flattened; },
      [](const GateContext& c) {
        return c.final_state.effects_of("dough").flattened &&
               rests_on(c.final_state, "candies", "dough");
      }));

  return out;
}

}  // namespace tabletop::harness
