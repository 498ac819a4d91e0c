#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tabletop/common/report.hpp"
#include "tabletop/plan/location.hpp"

namespace tabletop::plan {

// An object the comprehension stage decided is relevant to the task, plus
// whether it will be used as a tool.
struct ObjectEntry {
  std::string name;
  bool is_tool = false;

  bool operator==(const ObjectEntry&) const = default;
};

// One high-level step: what to do, where, to which object, with which tool.
// Empty object/tool mean "none".
struct HighLevelStep {
  std::string action;
  LocationExpr location;
  std::string object;
  std::string tool;

  bool operator==(const HighLevelStep&) const = default;
};

// Text form is a bracketed list of four quoted phrases, e.g.
//   ['pickup', 'original position of tomato', 'tomato', 'none']
// Single, double, and backquotes are accepted; the canonical serialization
// uses single quotes.
HighLevelStep parse_step(std::string_view text);
std::string serialize_step(const HighLevelStep& step);

// One step per nonempty line.
std::vector<HighLevelStep> parse_plan(std::string_view text);
std::string serialize_plan(const std::vector<HighLevelStep>& steps);

// Checks every step against the known-object list: object/tool must name a
// known object (or none), the tool slot may only hold tool objects, and
// object-anchored locations must reference known objects. All problems are
// reported, not just the first.
ValidationReport validate_plan(const std::vector<HighLevelStep>& steps,
                               const std::vector<ObjectEntry>& objects);

// True when the step picks up something the comprehension stage flagged as a
// tool; those pickups are routed to the grasp planner instead of the step
// planner.
bool requires_tool_pickup(const HighLevelStep& step,
                          const std::vector<ObjectEntry>& objects);

}  // namespace tabletop::plan
