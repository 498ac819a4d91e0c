#include "tabletop/dsl/actions.hpp"

#include <cmath>

#include "tabletop/common/errors.hpp"
#include "tabletop/common/strings.hpp"

namespace tabletop::dsl {

namespace {

constexpr std::string_view kGoToHead = "Go-to:";
constexpr std::string_view kGraspHead = "Grasp:";
constexpr std::string_view kTiltHead = "Tilt:";

std::array<double, 3> parse_triple(std::string_view text, std::string_view what) {
  const std::string_view t = trim(text);
  if (t.size() < 2 || t.front() != '(' || t.back() != ')')
    throw Error(ErrorCode::ParseError, std::string(what) + " must be parenthesized: '" + std::string(t) + "'");
  const auto parts = split(t.substr(1, t.size() - 2), ',');
  if (parts.size() != 3)
    throw Error(ErrorCode::ParseError,
                std::string(what) + " needs 3 components, got " + std::to_string(parts.size()));
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const auto v = parse_double(parts[i]);
    if (!v)
      throw Error(ErrorCode::ParseError,
                  std::string(what) + " has a non-numeric component: '" + std::string(trim(parts[i])) + "'");
    out[i] = *v;
  }
  return out;
}

}  // namespace

Action parse_action(std::string_view line) {
  const std::string_view t = trim(line);
  if (t.starts_with(kGoToHead)) {
    const std::string_view rest = t.substr(kGoToHead.size());
    const size_t plus = rest.find('+');
    if (plus == std::string_view::npos)
      throw Error(ErrorCode::ParseError, "move is missing '+ (x, y, z) cm': '" + std::string(t) + "'");
    GoTo go;
    go.location = plan::parse_location(rest.substr(0, plus));
    std::string_view tail = trim(rest.substr(plus + 1));
    if (!tail.ends_with("cm"))
      throw Error(ErrorCode::ParseError, "move offset must end in 'cm': '" + std::string(t) + "'");
    tail.remove_suffix(2);
    go.delta_cm = parse_triple(tail, "move offset");
    return go;
  }
  if (t.starts_with(kGraspHead)) {
    const auto v = parse_int(t.substr(kGraspHead.size()));
    if (!v || (*v != 0 && *v != 1))
      throw Error(ErrorCode::ParseError, "grasp state must be 0 or 1: '" + std::string(t) + "'");
    return Grasp{static_cast<int>(*v)};
  }
  if (t.starts_with(kTiltHead)) {
    return Tilt{parse_triple(t.substr(kTiltHead.size()), "tilt angles")};
  }
  throw Error(ErrorCode::ParseError, "unrecognized action: '" + std::string(t) + "'");
}

std::string serialize_action(const Action& action) {
  struct Visitor {
    std::string operator()(const GoTo& g) const {
      return std::string(kGoToHead) + " " + plan::serialize_location(g.location) + " + (" +
             format_double(g.delta_cm[0]) + ", " + format_double(g.delta_cm[1]) + ", " +
             format_double(g.delta_cm[2]) + ") cm";
    }
    std::string operator()(const Grasp& g) const {
      return std::string(kGraspHead) + " " + std::to_string(g.state);
    }
    std::string operator()(const Tilt& ti) const {
      return std::string(kTiltHead) + "(" + format_double(ti.rpy_deg[0]) + ", " +
             format_double(ti.rpy_deg[1]) + ", " + format_double(ti.rpy_deg[2]) + ")";
    }
  };
  return std::visit(Visitor{}, action);
}

std::vector<Action> parse_sequence(std::string_view text) {
  std::vector<Action> out;
  for (const auto& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    out.push_back(parse_action(line));
  }
  return out;
}

std::string serialize_sequence(const std::vector<Action>& actions) {
  std::string out;
  for (const auto& a : actions) {
    out += serialize_action(a);
    out += '\n';
  }
  return out;
}

ValidationReport validate_sequence(const std::vector<Action>& actions,
                                   const SequenceContext& context, double max_delta_cm) {
  ValidationReport report;
  bool holding = context.holding;
  bool moved = false;
  for (size_t i = 0; i < actions.size(); ++i) {
    const int idx = static_cast<int>(i);
    if (const auto* go = std::get_if<GoTo>(&actions[i])) {
      moved = true;
      for (double d : go->delta_cm) {
        if (std::abs(d) > max_delta_cm) {
          report.issues.push_back({idx, "delta-out-of-bounds",
                                   "offset component " + format_double(d) + " cm exceeds +/-" +
                                       format_double(max_delta_cm) + " cm"});
          break;
        }
      }
    } else if (const auto* gr = std::get_if<Grasp>(&actions[i])) {
      if (gr->state != 0 && gr->state != 1) {
        report.issues.push_back({idx, "bad-grasp-state", "grasp state must be 0 or 1"});
      } else if (gr->state == 1) {
        if (holding)
          report.issues.push_back({idx, "redundant-grasp-close", "gripper is already closed"});
        else if (!moved)
          report.issues.push_back(
              {idx, "grasp-without-approach", "gripper closes before any move in the sequence"});
        holding = true;
      } else {
        if (!holding)
          report.issues.push_back({idx, "redundant-grasp-open", "gripper is already open"});
        holding = false;
      }
    }
  }
  return report;
}

}  // namespace tabletop::dsl
