#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "tabletop/agents/backend.hpp"
#include "tabletop/dsl/actions.hpp"
#include "tabletop/plan/schema.hpp"

namespace tabletop::agents {

struct ObjectGeometry {
  Eigen::Vector3d centroid{0, 0, 0};
  Eigen::Vector3d dims{0, 0, 0};
};
using GeometryMap = std::map<std::string, ObjectGeometry>;

struct AgentConfig {
  int retries = 1;  // re-prompts (with diagnostics) after an invalid response
};

using AuditLogger =
    std::function<void(Role, const CompletionRequest&, const std::string& response)>;

// The language side of the pipeline: decide what matters, write the
// four-part plan, expand a step into gripper actions, match a tool name to a
// stored model. Every response is parsed strictly; an invalid one earns a
// single diagnostic re-prompt before the stage gives up.
class AgentSuite {
 public:
  AgentSuite(std::shared_ptr<CompletionBackend> backend, PromptLibrary prompts,
             AgentConfig config = {}, AuditLogger logger = nullptr);

  std::vector<plan::ObjectEntry> comprehend_scene(const std::string& query,
                                                  const std::vector<std::string>& object_names);

  std::vector<plan::HighLevelStep> plan_task(const std::string& query,
                                             const std::vector<plan::ObjectEntry>& objects);

  std::vector<dsl::Action> plan_step(const plan::HighLevelStep& step,
                                     const std::optional<plan::HighLevelStep>& prev,
                                     const GeometryMap& geometry, bool holding);

  std::optional<std::string> map_tool(const std::string& tool, const std::string& task,
                                      const std::vector<std::string>& db_names);

  CompletionBackend& backend() { return *backend_; }

  // Canonical request digests: the semantic content only (names, steps,
  // flags), never measured geometry, so scripted policies survive scene
  // randomization. Exposed for building policy tables.
  static std::string comprehension_key(const std::string& query,
                                       const std::vector<std::string>& object_names);
  static std::string plan_key(const std::string& query,
                              const std::vector<plan::ObjectEntry>& objects);
  static std::string step_key(const plan::HighLevelStep& step,
                              const std::optional<plan::HighLevelStep>& prev,
                              const GeometryMap& geometry, bool holding);
  static std::string tool_key(const std::string& tool, const std::string& task,
                              const std::vector<std::string>& db_names);
  static std::string retry_key(const std::string& key);

 private:
  std::string run(Role role, const CompletionRequest& request);

  std::shared_ptr<CompletionBackend> backend_;
  PromptLibrary prompts_;
  AgentConfig config_;
  AuditLogger logger_;
};

}  // namespace tabletop::agents
