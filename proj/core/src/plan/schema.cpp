#include "tabletop/plan/schema.hpp"

#include <algorithm>
#include <cctype>

#include "tabletop/common/errors.hpp"
#include "tabletop/common/strings.hpp"

namespace tabletop::plan {

namespace {

constexpr std::string_view kNone = "none";

bool is_quote(char c) { return c == '\'' || c == '"' || c == '`'; }

// Extracts the four quoted phrases of a bracketed tuple. Mismatched quote
// styles are fine (LLM output often opens with a backquote and closes with an
// apostrophe); what matters is the list shape.
std::vector<std::string> parse_quoted_tuple(std::string_view text) {
  const std::string_view t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    throw Error(ErrorCode::ParseError, "step is not a bracketed list: '" + std::string(t) + "'");
  std::string_view body = t.substr(1, t.size() - 2);

  std::vector<std::string> phrases;
  size_t i = 0;
  auto skip_ws = [&] {
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
  };
  while (true) {
    skip_ws();
    if (i >= body.size()) break;
    if (!is_quote(body[i]))
      throw Error(ErrorCode::ParseError, "expected a quoted phrase in step: '" + std::string(t) + "'");
    ++i;
    const size_t start = i;
    while (i < body.size() && !is_quote(body[i])) ++i;
    if (i >= body.size())
      throw Error(ErrorCode::ParseError, "unterminated quote in step: '" + std::string(t) + "'");
    phrases.emplace_back(trim(body.substr(start, i - start)));
    ++i;
    skip_ws();
    if (i >= body.size()) break;
    if (body[i] != ',')
      throw Error(ErrorCode::ParseError, "expected ',' between phrases in step: '" + std::string(t) + "'");
    ++i;
  }
  return phrases;
}

}  // namespace

HighLevelStep parse_step(std::string_view text) {
  const auto phrases = parse_quoted_tuple(text);
  if (phrases.size() != 4)
    throw Error(ErrorCode::ParseError,
                "step needs exactly 4 phrases, got " + std::to_string(phrases.size()) + ": '" +
                    std::string(trim(text)) + "'");
  HighLevelStep step;
  step.action = phrases[0];
  step.location = parse_location(phrases[1]);
  step.object = (phrases[2] == kNone) ? std::string() : phrases[2];
  step.tool = (phrases[3] == kNone) ? std::string() : phrases[3];
  return step;
}

std::string serialize_step(const HighLevelStep& step) {
  auto q = [](std::string_view s) { return "'" + std::string(s) + "'"; };
  const std::string obj = step.object.empty() ? std::string(kNone) : step.object;
  const std::string tool = step.tool.empty() ? std::string(kNone) : step.tool;
  return "[" + q(step.action) + ", " + q(serialize_location(step.location)) + ", " + q(obj) +
         ", " + q(tool) + "]";
}

std::vector<HighLevelStep> parse_plan(std::string_view text) {
  std::vector<HighLevelStep> steps;
  for (const auto& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    steps.push_back(parse_step(line));
  }
  return steps;
}

std::string serialize_plan(const std::vector<HighLevelStep>& steps) {
  std::string out;
  for (const auto& s : steps) {
    out += serialize_step(s);
    out += '\n';
  }
  return out;
}

ValidationReport validate_plan(const std::vector<HighLevelStep>& steps,
                               const std::vector<ObjectEntry>& objects) {
  ValidationReport report;
  auto find = [&](const std::string& name) -> const ObjectEntry* {
    auto it = std::find_if(objects.begin(), objects.end(),
                           [&](const ObjectEntry& e) { return e.name == name; });
    return it == objects.end() ? nullptr : &*it;
  };

  if (steps.empty()) {
    report.issues.push_back({-1, "empty-plan", "plan has no steps"});
    return report;
  }
  for (size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    const int idx = static_cast<int>(i);
    if (trim(s.action).empty())
      report.issues.push_back({idx, "empty-action", "step has an empty action"});
    if (!s.object.empty() && !find(s.object))
      report.issues.push_back({idx, "unknown-object", "unknown object '" + s.object + "'"});
    if (!s.tool.empty()) {
      const ObjectEntry* e = find(s.tool);
      if (!e) {
        report.issues.push_back({idx, "unknown-tool", "unknown tool '" + s.tool + "'"});
      } else if (!e->is_tool) {
        report.issues.push_back({idx, "tool-not-tool", "'" + s.tool + "' is not a tool"});
      }
    }
    if (s.location.kind != LocationKind::Home && !find(s.location.object))
      report.issues.push_back(
          {idx, "unknown-location-object", "location references unknown object '" + s.location.object + "'"});
  }
  return report;
}

bool requires_tool_pickup(const HighLevelStep& step, const std::vector<ObjectEntry>& objects) {
  if (step.action != "pickup" || step.object.empty()) return false;
  auto it = std::find_if(objects.begin(), objects.end(),
                         [&](const ObjectEntry& e) { return e.name == step.object; });
  return it != objects.end() && it->is_tool;
}

}  // namespace tabletop::plan
