#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace tabletop::agents {

enum class Role { SceneComprehension, OverallPlanner, StepPlanner, ToolMapper };
std::string_view role_name(Role role);

// Prompt templates with {placeholder} slots. Rendering binds every slot or
// fails; unknown slots in `values` fail too, so templates and call sites
// cannot drift apart silently.
class PromptLibrary {
 public:
  // Reads <dir>/<role>.txt for all four roles.
  static PromptLibrary load_dir(const std::filesystem::path& dir);
  // Built-in templates, used when no prompt directory is given.
  static PromptLibrary builtin();

  void set(Role role, std::string text);
  const std::string& text(Role role) const;

  std::string render(Role role, const std::map<std::string, std::string>& values) const;

 private:
  std::map<Role, std::string> templates_;
};

}  // namespace tabletop::agents
