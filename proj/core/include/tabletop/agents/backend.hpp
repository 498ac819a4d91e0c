#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tabletop/agents/prompts.hpp"

namespace tabletop::agents {

// One completion request. `prompt` is the full rendered text a live model
// sees. `key` is a canonical digest of the request's semantic content (no
// continuous geometry), which is what scripted policies are indexed by so a
// policy table stays valid under scene randomization.
struct CompletionRequest {
  std::string prompt;
  std::string key;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string complete(Role role, const CompletionRequest& request) = 0;
  virtual std::string name() const = 0;
};

// Deterministic table of canned responses, looked up by (role, key). Used by
// the experiment harness and tests. Missing entries are protocol errors so
// an incomplete policy table fails loudly instead of improvising.
class ScriptedBackend final : public CompletionBackend {
 public:
  void add(Role role, const std::string& key, std::string response);
  bool has(Role role, const std::string& key) const;

  std::string complete(Role role, const CompletionRequest& request) override;
  std::string name() const override { return "scripted"; }

  // Keys that were requested but missing, for debugging policy tables.
  const std::vector<std::string>& misses() const { return misses_; }

 private:
  std::map<std::pair<Role, std::string>, std::string> responses_;
  std::vector<std::string> misses_;
};

struct RemoteBackendConfig {
  std::string endpoint = "http://127.0.0.1:8089/v1/chat/completions";
  std::string model = "default";
  std::string api_key_env = "TABLETOP_API_KEY";  // name of the env var holding the key
  double temperature = 0.0;
  double timeout_seconds = 30.0;
  int max_attempts = 3;  // total tries per request
};

// Chat-completion client speaking the common JSON protocol over HTTP(S).
// Each request carries the role as the system message. Network and protocol
// problems surface as BackendTimeout / BackendProtocol errors after the
// retry budget is spent.
class RemoteBackend final : public CompletionBackend {
 public:
  explicit RemoteBackend(RemoteBackendConfig config);

  std::string complete(Role role, const CompletionRequest& request) override;
  std::string name() const override { return "remote"; }

 private:
  RemoteBackendConfig config_;
  std::string scheme_;
  std::string host_;
  int port_ = 0;
  std::string path_;
};

}  // namespace tabletop::agents
