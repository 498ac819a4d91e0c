#pragma once

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tabletop/common/report.hpp"
#include "tabletop/plan/location.hpp"

namespace tabletop::dsl {

// Move the gripper to a symbolic location plus a metric offset. The offset is
// written in centimeters in text form and converted by the executor.
struct GoTo {
  plan::LocationExpr location;
  std::array<double, 3> delta_cm{0, 0, 0};

  bool operator==(const GoTo&) const = default;
};

// 1 = close, 0 = open.
struct Grasp {
  int state = 0;

  bool operator==(const Grasp&) const = default;
};

// Absolute gripper orientation as roll/pitch/yaw in degrees (Z-Y-X
// convention: the rotation applied is Rz(yaw) * Ry(pitch) * Rx(roll)).
struct Tilt {
  std::array<double, 3> rpy_deg{0, 0, 0};

  bool operator==(const Tilt&) const = default;
};

using Action = std::variant<GoTo, Grasp, Tilt>;

// Text templates:
//   Go-to: <location> + (x, y, z) cm
//   Grasp: <0 or 1>
//   Tilt:(roll, pitch, yaw)
// Heads are matched exactly; anything else is a parse error.
Action parse_action(std::string_view line);
std::string serialize_action(const Action& action);

// One action per nonempty line.
std::vector<Action> parse_sequence(std::string_view text);
std::string serialize_sequence(const std::vector<Action>& actions);

struct SequenceContext {
  bool holding = false;  // gripper already closed around something
};

// Static checks only (no world knowledge): redundant grasp transitions,
// closing the gripper without having moved anywhere first, and offsets
// outside the reachable envelope.
ValidationReport validate_sequence(const std::vector<Action>& actions,
                                   const SequenceContext& context,
                                   double max_delta_cm = 50.0);

}  // namespace tabletop::dsl
