#pragma once

#include <vector>

#include "tabletop/dsl/actions.hpp"
#include "tabletop/plan/schema.hpp"
#include "tabletop/world/types.hpp"

namespace tabletop::world {

// Tunables of the toy physics. Defaults are the contract the tests pin down;
// they only move together with the documentation.
struct ActionLimits {
  double grasp_attach_dist = 0.02;        // gripper-to-surface reach of a close
  double max_jaw_opening = 0.08;          // widest graspable piece
  double place_tolerance = 0.03;          // slack when checking a placement
  double region_inflation = 0.002;        // contact counts as on-handle within this
  double scoop_tilt_deg = 30.0;           // head elevation that fills / empties a scoop
  double flatten_clearance = 0.01;        // head-above-table height that presses dough
  int whisk_reversals = 3;                // direction flips that finish whisking
  double trajectory_step = 0.005;         // spacing of straight-line motion samples
  double container_floor_clearance = 0.005;
  double pour_rest_tolerance = 0.01;      // bottom-to-surface slack for poured/placed-on checks
  double max_delta_cm = 50.0;             // reachable offset envelope
};

// Where a symbolic location is right now. Unknown object names are action
// errors.
Eigen::Vector3d resolve_location(const WorldState& state, const plan::LocationExpr& loc);

struct ApplyResult {
  WorldState state;
  std::vector<Event> events;
};

// Executes one primitive against a copy of the world and reports what
// happened. Throws Error(ActionError) for commands the robot refuses: moving
// below the table, closing an already-closed gripper, opening an already-open
// one, or sweeping a held object into the table.
ApplyResult apply_action(const WorldState& state, const dsl::Action& action,
                         const ActionLimits& limits = {});

ApplyResult apply_sequence(const WorldState& state, const std::vector<dsl::Action>& actions,
                           const ActionLimits& limits = {});

enum class VerifyStatus { Pass, Fail, Unverifiable };

struct VerificationResult {
  VerifyStatus status = VerifyStatus::Unverifiable;
  std::string reason;

  bool passed() const { return status == VerifyStatus::Pass; }
  bool failed() const { return status == VerifyStatus::Fail; }
};

// Did the step achieve its goal? Compares the worlds before and after the
// step's actions ran. Verbs without a check rule come back Unverifiable.
VerificationResult verify_step(const WorldState& before, const WorldState& after,
                               const plan::HighLevelStep& step, const ActionLimits& limits = {});

// Reach of an object in the table plane: the largest horizontal distance
// from its position to any point of its pieces.
double xy_circumradius(const SceneObject& obj);

}  // namespace tabletop::world
