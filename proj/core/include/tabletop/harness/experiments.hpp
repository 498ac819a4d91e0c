#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tabletop/plan/schema.hpp"
#include "tabletop/run/trace.hpp"
#include "tabletop/world/types.hpp"

namespace tabletop::harness {

enum class TaskCategory { PickPlace, SingleTool, MultiTool };
std::string_view category_label(TaskCategory c);

// Inputs of a milestone check: the finished trace plus its own world
// snapshots, parsed back into states.
struct GateContext {
  const run::ExecutionTrace& trace;
  const world::WorldState& initial;
  const world::WorldState& final_state;
};

using GateCheck = std::function<bool(const GateContext&)>;

// One benchmark task: the sentence given to the agents, the scene it runs
// in, the objects the comprehension stage is expected to keep, and the two
// task-specific milestones.
struct Experiment {
  TaskCategory category = TaskCategory::PickPlace;
  std::string name;   // short slug used in reports and seed derivation
  std::string query;  // the task sentence, verbatim
  std::vector<plan::ObjectEntry> relevant;
  world::WorldState base_scene;
  GateCheck milestone;  // the task's defining tool-object interaction
  GateCheck full;       // the task finished end to end

  // Jittered copy of the base scene; the same seed always gives the same
  // layout.
  world::WorldState make_scene(std::uint64_t seed) const;
};

// A trace is scored by the highest rung whose whole ladder holds below it:
// 25 comprehension, 50 grounding, 75 milestone, 100 full.
struct GateLadder {
  bool comprehension = false;  // relevant-object set matches exactly
  bool grounding = false;      // every relevant grounding within 1 cm of truth
  bool milestone = false;
  bool full = false;

  int score() const;
};

inline constexpr double kGroundingTolerance = 0.01;  // meters

GateLadder evaluate_gates(const Experiment& exp, const run::ExecutionTrace& trace);
int score_trace(const Experiment& exp, const run::ExecutionTrace& trace);

// True when some step logged an event of this kind whose details include
// every given key/value pair.
bool trace_has_event(const run::ExecutionTrace& trace, std::string_view kind,
                     const std::map<std::string, std::string>& detail);

// The eight benchmark tasks: two plain pick-and-place, three single-tool,
// three multi-tool.
std::vector<Experiment> default_experiments();

}  // namespace tabletop::harness
