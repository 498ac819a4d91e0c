#include "tabletop/agents/agents.hpp"

#include <algorithm>
#include <set>

#include "tabletop/common/errors.hpp"
#include "tabletop/common/strings.hpp"

namespace tabletop::agents {

namespace {

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::string entries_digest(const std::vector<plan::ObjectEntry>& objects) {
  std::vector<std::string> parts;
  parts.reserve(objects.size());
  for (const auto& e : objects) parts.push_back(e.name + (e.is_tool ? ":tool" : ":object"));
  return join(sorted(std::move(parts)), ",");
}

std::string strip_quotes(std::string_view s) {
  std::string_view t = trim(s);
  auto is_quote = [](char c) { return c == '\'' || c == '"' || c == '`'; };
  while (t.size() >= 2 && is_quote(t.front()) && is_quote(t.back())) {
    t.remove_prefix(1);
    t.remove_suffix(1);
    t = trim(t);
  }
  return std::string(t);
}

std::vector<plan::ObjectEntry> parse_comprehension(const std::string& text) {
  std::vector<plan::ObjectEntry> out;
  std::set<std::string> seen;
  for (const auto& line : split_lines(text)) {
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    const size_t colon = t.rfind(':');
    if (colon == std::string_view::npos)
      throw Error(ErrorCode::ParseError, "expected 'name: tool' or 'name: not tool': '" +
                                             std::string(t) + "'");
    const std::string name = strip_quotes(t.substr(0, colon));
    const std::string_view flag = trim(t.substr(colon + 1));
    if (name.empty())
      throw Error(ErrorCode::ParseError, "empty object name in '" + std::string(t) + "'");
    if (!seen.insert(name).second)
      throw Error(ErrorCode::ParseError, "object '" + name + "' listed twice");
    if (flag == "tool")
      out.push_back({name, true});
    else if (flag == "not tool")
      out.push_back({name, false});
    else
      throw Error(ErrorCode::ParseError, "expected 'tool' or 'not tool' after '" + name + "'");
  }
  if (out.empty()) throw Error(ErrorCode::ParseError, "no objects in comprehension response");
  return out;
}

}  // namespace

AgentSuite::AgentSuite(std::shared_ptr<CompletionBackend> backend, PromptLibrary prompts,
                       AgentConfig config, AuditLogger logger)
    : backend_(std::move(backend)),
      prompts_(std::move(prompts)),
      config_(config),
      logger_(std::move(logger)) {}

std::string AgentSuite::run(Role role, const CompletionRequest& request) {
  try {
    std::string response = backend_->complete(role, request);
    if (logger_) logger_(role, request, response);
    return response;
  } catch (const Error& e) {
    if (logger_) logger_(role, request, std::string("<error> ") + e.what());
    throw;
  }
}

std::string AgentSuite::comprehension_key(const std::string& query,
                                          const std::vector<std::string>& object_names) {
  return "task=" + query + "|objects=" + join(sorted(object_names), ",");
}

std::string AgentSuite::plan_key(const std::string& query,
                                 const std::vector<plan::ObjectEntry>& objects) {
  return "task=" + query + "|objects=" + entries_digest(objects);
}

std::string AgentSuite::step_key(const plan::HighLevelStep& step,
                                 const std::optional<plan::HighLevelStep>& prev,
                                 const GeometryMap& geometry, bool holding) {
  std::vector<std::string> names;
  names.reserve(geometry.size());
  for (const auto& [name, geo] : geometry) {
    (void)geo;
    names.push_back(name);
  }
  return "step=" + plan::serialize_step(step) +
         "|prev=" + (prev ? plan::serialize_step(*prev) : std::string("none")) +
         "|holding=" + (holding ? "1" : "0") + "|objects=" + join(names, ",");
}

std::string AgentSuite::tool_key(const std::string& tool, const std::string& task,
                                 const std::vector<std::string>& db_names) {
  return "tool=" + tool + "|task=" + task + "|db=" + join(sorted(db_names), ",");
}

std::string AgentSuite::retry_key(const std::string& key) { return key + "|retry"; }

std::vector<plan::ObjectEntry> AgentSuite::comprehend_scene(
    const std::string& query, const std::vector<std::string>& object_names) {
  std::vector<std::string> lines;
  for (const auto& n : sorted(object_names)) lines.push_back("- " + n);
  CompletionRequest req;
  req.prompt = prompts_.render(Role::SceneComprehension,
                               {{"user_query", query}, {"object_list", join(lines, "\n")}});
  req.key = comprehension_key(query, object_names);

  std::string problem;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    const std::string response = run(Role::SceneComprehension, req);
    try {
      return parse_comprehension(response);
    } catch (const Error& e) {
      problem = e.what();
      req.key = retry_key(req.key);
      req.prompt += "\nYour previous answer could not be used (" + problem +
                    "). Answer again, following the format exactly.\n";
    }
  }
  throw Error(ErrorCode::ParseError, "scene comprehension failed: " + problem);
}

std::vector<plan::HighLevelStep> AgentSuite::plan_task(
    const std::string& query, const std::vector<plan::ObjectEntry>& objects) {
  std::vector<std::string> lines;
  {
    std::vector<std::string> parts;
    for (const auto& e : objects) parts.push_back(e.name + (e.is_tool ? " (tool)" : ""));
    for (const auto& p : sorted(std::move(parts))) lines.push_back("- " + p);
  }
  CompletionRequest req;
  req.prompt = prompts_.render(Role::OverallPlanner,
                               {{"user_query", query}, {"object_list", join(lines, "\n")}});
  req.key = plan_key(query, objects);

  std::string problem;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    const std::string response = run(Role::OverallPlanner, req);
    try {
      std::vector<plan::HighLevelStep> steps = plan::parse_plan(response);
      const ValidationReport report = plan::validate_plan(steps, objects);
      if (!report.ok()) throw Error(ErrorCode::ValidationError, report.summary());
      return steps;
    } catch (const Error& e) {
      problem = e.what();
      req.key = retry_key(req.key);
      req.prompt += "\nYour previous plan was rejected (" + problem +
                    "). Write a corrected plan, following the format exactly.\n";
    }
  }
  throw Error(ErrorCode::ValidationError, "task planning failed: " + problem);
}

std::vector<dsl::Action> AgentSuite::plan_step(const plan::HighLevelStep& step,
                                               const std::optional<plan::HighLevelStep>& prev,
                                               const GeometryMap& geometry, bool holding) {
  std::vector<std::string> geo_lines;
  for (const auto& [name, geo] : geometry) {
    geo_lines.push_back("- " + name + ": centroid " + format_double(geo.centroid.x()) + " " +
                        format_double(geo.centroid.y()) + " " + format_double(geo.centroid.z()) +
                        ", size " + format_double(geo.dims.x()) + " " +
                        format_double(geo.dims.y()) + " " + format_double(geo.dims.z()));
  }
  CompletionRequest req;
  req.prompt = prompts_.render(
      Role::StepPlanner,
      {{"step", plan::serialize_step(step)},
       {"prev_step", prev ? plan::serialize_step(*prev) : std::string("none")},
       {"geometry", geo_lines.empty() ? std::string("(none)") : join(geo_lines, "\n")}});
  req.key = step_key(step, prev, geometry, holding);

  std::string problem;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    const std::string response = run(Role::StepPlanner, req);
    try {
      std::vector<dsl::Action> actions = dsl::parse_sequence(response);
      if (actions.empty())
        throw Error(ErrorCode::ValidationError, "step expansion produced no actions");
      const ValidationReport report = dsl::validate_sequence(actions, {holding});
      if (!report.ok()) throw Error(ErrorCode::ValidationError, report.summary());
      return actions;
    } catch (const Error& e) {
      problem = e.what();
      req.key = retry_key(req.key);
      req.prompt += "\nYour previous answer was rejected (" + problem +
                    "). Answer again, following the action templates exactly.\n";
    }
  }
  throw Error(ErrorCode::ValidationError, "step expansion failed: " + problem);
}

std::optional<std::string> AgentSuite::map_tool(const std::string& tool, const std::string& task,
                                                const std::vector<std::string>& db_names) {
  CompletionRequest req;
  req.prompt = prompts_.render(
      Role::ToolMapper,
      {{"tool", tool}, {"task", task}, {"db_tools", join(sorted(db_names), ", ")}});
  req.key = tool_key(tool, task, db_names);

  const std::string response = run(Role::ToolMapper, req);
  const std::string token = strip_quotes(trim(response));
  if (token.empty() || token == "none") return std::nullopt;
  if (std::find(db_names.begin(), db_names.end(), token) != db_names.end()) return token;
  return std::nullopt;
}

}  // namespace tabletop::agents
