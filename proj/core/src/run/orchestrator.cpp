#include "tabletop/run/orchestrator.hpp"

#include <algorithm>
#include <set>

#include "tabletop/common/errors.hpp"
#include "tabletop/common/rng.hpp"
#include "tabletop/dsl/actions.hpp"
#include "tabletop/world/scene_io.hpp"

namespace tabletop::run {

namespace {

// Objects a step talks about, in mention order: location anchor, object,
// tool.
std::vector<std::string> step_references(const plan::HighLevelStep& step) {
  std::vector<std::string> out;
  auto add = [&out](const std::string& name) {
    if (!name.empty() && std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  };
  if (step.location.kind != plan::LocationKind::Home) add(step.location.object);
  add(step.object);
  add(step.tool);
  return out;
}

bool is_planning_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::BackendTimeout:
    case ErrorCode::BackendProtocol:
      return true;
    default:
      return false;
  }
}

}  // namespace

ExecutionTrace run_task(const std::string& query, const world::WorldState& initial,
                        const RunConfig& cfg, agents::AgentSuite& agents,
                        const grasp::ToolDatabase& db) {
  ExecutionTrace trace;
  trace.query = query;
  trace.seed = cfg.seed;
  trace.backend = agents.backend().name();
  trace.initial_world = world::serialize_world(initial);

  world::WorldState state = initial;
  perception::Pipeline pipeline(cfg.perception);
  Rng rng(derive_seed(cfg.seed, "run"));

  const auto finish = [&](const std::string& status, const std::string& stage,
                          const std::string& reason) -> ExecutionTrace& {
    trace.status = status;
    trace.failure_stage = stage;
    trace.failure_reason = reason;
    trace.final_world = world::serialize_world(state);
    return trace;
  };

  // Scene comprehension. The detector works from queries, so the agent is
  // handed the scene's object names and classifies which of them are tools.
  std::vector<std::string> names;
  for (const auto& obj : state.objects) names.push_back(obj.name);
  try {
    trace.comprehension = agents.comprehend_scene(query, names);
  } catch (const Error& e) {
    return finish("aborted", "comprehension", e.what());
  }

  std::vector<plan::HighLevelStep> steps;
  try {
    steps = agents.plan_task(query, trace.comprehension);
  } catch (const Error& e) {
    return finish("aborted", "planning", e.what());
  }
  for (const auto& step : steps) trace.plan.push_back(plan::serialize_step(step));

  // Ground everything the plan mentions before moving. A name the vision
  // stack cannot find stops the run here.
  agents::GeometryMap measured;
  std::vector<std::string> referenced;
  for (const auto& step : steps) {
    for (const auto& name : step_references(step)) {
      if (std::find(referenced.begin(), referenced.end(), name) == referenced.end())
        referenced.push_back(name);
    }
  }
  bool grounding_ok = true;
  for (const auto& name : referenced) {
    GroundingRecord rec;
    rec.name = name;
    try {
      const perception::FusedObject fused = pipeline.query_object(state, name, rng);
      rec.found = true;
      rec.centroid = fused.centroid;
      rec.dims = fused.dims;
      rec.logit_sum = fused.logit_sum;
      rec.view_count = static_cast<int>(fused.members.size());
      measured[name] = {fused.centroid, fused.dims};
    } catch (const Error& e) {
      rec.found = false;
      rec.error = e.what();
      grounding_ok = false;
    }
    trace.groundings.push_back(std::move(rec));
  }
  if (!grounding_ok) {
    return finish("aborted", "grounding", "one or more referenced objects were not found");
  }

  std::optional<plan::HighLevelStep> prev;
  for (size_t i = 0; i < steps.size(); ++i) {
    const plan::HighLevelStep& step = steps[i];
    StepRecord rec;
    rec.step = plan::serialize_step(step);
    const world::WorldState before = state;

    try {
      std::vector<dsl::Action> actions;
      if (plan::requires_tool_pickup(step, trace.comprehension)) {
        const auto mapped = agents.map_tool(step.object, query, db.names());
        grasp::GraspPlannerConfig grasp_cfg = cfg.grasp;
        grasp_cfg.no_affordance = cfg.no_affordance || cfg.grasp.no_affordance;
        Rng wrist = rng.fork("wrist-" + std::to_string(i));
        const Eigen::Vector3d anchor = measured.at(step.object).centroid;
        const grasp::GraspPlan plan =
            grasp::plan_grasp(state, anchor, mapped, db, grasp_cfg, wrist);

        GraspTraceRecord grec;
        grec.object = step.object;
        grec.db_model = plan.db_model;
        grec.used_fallback = plan.used_fallback;
        grec.no_affordance = plan.no_affordance;
        grec.pixel_in_region = plan.pixel_in_region;
        grec.align_iou = plan.align_iou;
        grec.width_m = plan.picked.width_m;
        grec.score = plan.picked.score;
        grec.tcp_position = plan.tcp_pose.position;
        grec.yaw_deg = plan.tcp_pose.rpy_deg[2];
        rec.grasp = grec;

        const Eigen::Vector3d delta_cm = (plan.tcp_pose.position - anchor) * 100.0;
        const auto at = plan::LocationExpr::current_of(step.object);
        const std::array<double, 3> hover{delta_cm.x(), delta_cm.y(), delta_cm.z() + 10.0};
        const std::array<double, 3> touch{delta_cm.x(), delta_cm.y(), delta_cm.z()};
        const std::array<double, 3> wrist_rpy{plan.tcp_pose.rpy_deg[0], plan.tcp_pose.rpy_deg[1],
                                              plan.tcp_pose.rpy_deg[2]};
        actions = {dsl::Tilt{wrist_rpy}, dsl::GoTo{at, hover}, dsl::GoTo{at, touch}, dsl::Grasp{1},
                   dsl::GoTo{at, hover}};
      } else {
        agents::GeometryMap geom;
        for (const auto& name : step_references(step)) {
          const auto it = measured.find(name);
          if (it != measured.end()) geom[name] = it->second;
        }
        actions = agents.plan_step(step, prev, geom, state.robot.held.has_value());
      }

      for (const auto& action : actions) {
        world::ApplyResult result = world::apply_action(state, action, cfg.limits);
        state = std::move(result.state);
        rec.actions.push_back(dsl::serialize_action(action));
        for (auto& event : result.events) rec.events.push_back({event.kind, event.detail});
      }
    } catch (const Error& e) {
      trace.steps.push_back(std::move(rec));
      return finish("aborted", is_planning_error(e.code()) ? "planning" : "execution", e.what());
    }

    const world::VerificationResult verdict = world::verify_step(before, state, step, cfg.limits);
    switch (verdict.status) {
      case world::VerifyStatus::Pass: rec.verify = "pass"; break;
      case world::VerifyStatus::Fail: rec.verify = "fail"; break;
      case world::VerifyStatus::Unverifiable: rec.verify = "unverifiable"; break;
    }
    rec.verify_reason = verdict.reason;
    const bool failed = verdict.failed();
    trace.steps.push_back(std::move(rec));
    if (failed) {
      return finish("aborted", "verify",
                    plan::serialize_step(step) + ": " + verdict.reason);
    }
    prev = step;
  }

  return finish("completed", "", "");
}

}  // namespace tabletop::run
