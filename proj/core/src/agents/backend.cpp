#include "tabletop/agents/backend.hpp"

#include <vector>

#include "tabletop/common/errors.hpp"

namespace tabletop::agents {

void ScriptedBackend::add(Role role, const std::string& key, std::string response) {
  responses_[{role, key}] = std::move(response);
}

bool ScriptedBackend::has(Role role, const std::string& key) const {
  return responses_.count({role, key}) > 0;
}

std::string ScriptedBackend::complete(Role role, const CompletionRequest& request) {
  auto it = responses_.find({role, request.key});
  if (it == responses_.end()) {
    misses_.push_back(std::string(role_name(role)) + " | " + request.key);
    throw Error(ErrorCode::BackendProtocol,
                "no scripted response for " + std::string(role_name(role)) + " key '" +
                    request.key + "'");
  }
  return it->second;
}

}  // namespace tabletop::agents
