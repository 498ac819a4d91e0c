#include "tabletop/agents/prompts.hpp"

#include "tabletop/common/errors.hpp"
#include "tabletop/world/scene_io.hpp"

namespace tabletop::agents {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::SceneComprehension: return "scene_comprehension";
    case Role::OverallPlanner: return "overall_planner";
    case Role::StepPlanner: return "step_planner";
    case Role::ToolMapper: return "tool_mapper";
  }
  return "unknown";
}

namespace {

constexpr const char* kSceneComprehension =
    "You are the scene comprehension stage of a tabletop manipulation robot.\n"
    "\n"
    "Task: {user_query}\n"
    "\n"
    "Objects visible on the table:\n"
    "{object_list}\n"
    "\n"
    "List the objects that matter for this task, one per line, in the form\n"
    "  name: tool\n"
    "or\n"
    "  name: not tool\n"
    "Mark an object as a tool only if the robot should hold it to act on\n"
    "something else. Output nothing but these lines.\n";

constexpr const char* kOverallPlanner =
    "You are the high-level planner of a tabletop manipulation robot.\n"
    "\n"
    "Task: {user_query}\n"
    "\n"
    "Relevant objects (name, tool or not):\n"
    "{object_list}\n"
    "\n"
    "Write the plan as one step per line. Each step is a bracketed\n"
    "four-part list:\n"
    "['<action>', '<location>', '<object>', '<tool>']\n"
    "Locations must be one of: 'original position of <name>',\n"
    "'current position of <name>', 'robot home pose'. Use 'none' for an\n"
    "unused object or tool slot. Allowed actions: pickup, place, scoop,\n"
    "pour, flatten, whisk, poke. Output nothing but the plan lines.\n";

constexpr const char* kStepPlanner =
    "You are the low-level step planner of a tabletop manipulation robot.\n"
    "\n"
    "Current step: {step}\n"
    "Previous step: {prev_step}\n"
    "\n"
    "Measured object geometry (name: centroid x y z, size x y z, meters):\n"
    "{geometry}\n"
    "\n"
    "Translate the step into gripper actions, one per line, using exactly\n"
    "these forms:\n"
    "Go-to: <location> + (x, y, z) cm\n"
    "Grasp: <0 or 1>\n"
    "Tilt:(roll, pitch, yaw)\n"
    "Locations follow the same grammar as the step. Offsets are\n"
    "centimeters; tilt angles are absolute degrees. Output nothing but the\n"
    "action lines.\n";

constexpr const char* kToolMapper =
    "You are the tool retrieval stage of a tabletop manipulation robot.\n"
    "\n"
    "The robot must use '{tool}' for this task: {task}\n"
    "\n"
    "Tool models on file: {db_tools}\n"
    "\n"
    "Answer with the single best matching model name from the list, or\n"
    "'none' if nothing fits. Output one line.\n";

}  // namespace

PromptLibrary PromptLibrary::builtin() {
  PromptLibrary lib;
  lib.set(Role::SceneComprehension, kSceneComprehension);
  lib.set(Role::OverallPlanner, kOverallPlanner);
  lib.set(Role::StepPlanner, kStepPlanner);
  lib.set(Role::ToolMapper, kToolMapper);
  return lib;
}

PromptLibrary PromptLibrary::load_dir(const std::filesystem::path& dir) {
  PromptLibrary lib;
  for (Role role : {Role::SceneComprehension, Role::OverallPlanner, Role::StepPlanner,
                    Role::ToolMapper}) {
    const auto path = dir / (std::string(role_name(role)) + ".txt");
    lib.set(role, world::load_text_file(path));
  }
  return lib;
}

void PromptLibrary::set(Role role, std::string text) { templates_[role] = std::move(text); }

const std::string& PromptLibrary::text(Role role) const {
  auto it = templates_.find(role);
  if (it == templates_.end())
    throw Error(ErrorCode::ValidationError,
                "no prompt template for role '" + std::string(role_name(role)) + "'");
  return it->second;
}

std::string PromptLibrary::render(Role role, const std::map<std::string, std::string>& values) const {
  const std::string& tpl = text(role);
  std::string out;
  out.reserve(tpl.size());
  std::map<std::string, bool> used;
  for (const auto& [k, v] : values) used[k] = false;

  size_t i = 0;
  while (i < tpl.size()) {
    const char c = tpl[i];
    if (c != '{') {
      out.push_back(c);
      ++i;
      continue;
    }
    const size_t close = tpl.find('}', i);
    if (close == std::string::npos)
      throw Error(ErrorCode::ValidationError,
                  "unclosed placeholder in '" + std::string(role_name(role)) + "' template");
    const std::string key = tpl.substr(i + 1, close - i - 1);
    auto it = values.find(key);
    if (it == values.end())
      throw Error(ErrorCode::ValidationError, "template placeholder {" + key + "} has no value");
    out += it->second;
    used[key] = true;
    i = close + 1;
  }
  for (const auto& [k, was_used] : used)
    if (!was_used)
      throw Error(ErrorCode::ValidationError,
                  "value '" + k + "' does not appear in the '" + std::string(role_name(role)) +
                      "' template");
  return out;
}

}  // namespace tabletop::agents
