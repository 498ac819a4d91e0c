#pragma once

#include <string>

#include "tabletop/agents/agents.hpp"
#include "tabletop/grasp/tog.hpp"
#include "tabletop/perception/pipeline.hpp"
#include "tabletop/run/trace.hpp"
#include "tabletop/world/actions.hpp"

namespace tabletop::run {

struct RunConfig {
  perception::PerceptionConfig perception;
  grasp::GraspPlannerConfig grasp;
  world::ActionLimits limits;
  std::uint64_t seed = 0;
  bool no_affordance = false;  // grasp tools at the silhouette centroid
};

// Drives one task end to end: comprehension, planning, up-front grounding of
// every object the plan references, then per-step decomposition, execution,
// and verification. Never throws: failures are recorded on the trace with
// the stage they occurred in, and execution stops at the first failed
// verification (unverifiable steps do not stop it).
ExecutionTrace run_task(const std::string& query, const world::WorldState& initial,
                        const RunConfig& cfg, agents::AgentSuite& agents,
                        const grasp::ToolDatabase& db);

}  // namespace tabletop::run
