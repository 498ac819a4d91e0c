#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "tabletop/common/errors.hpp"
#include "tabletop/common/rng.hpp"
#include "tabletop/plan/location.hpp"
#include "tabletop/plan/schema.hpp"

using namespace tabletop;
using namespace tabletop::plan;

TEST_CASE("parse_location recognizes the three phrasings") {
  CHECK(parse_location("original position of tomato") == LocationExpr::original_of("tomato"));
  CHECK(parse_location("current position of the bowl") == LocationExpr::current_of("the bowl"));
  CHECK(parse_location("robot home pose") == LocationExpr::home());
  CHECK(parse_location("  original position of dough  ") == LocationExpr::original_of("dough"));
}

TEST_CASE("parse_location rejects anything else") {
  CHECK_THROWS_AS(parse_location("next to the bowl"), Error);
  CHECK_THROWS_AS(parse_location("original position of "), Error);
  CHECK_THROWS_AS(parse_location(""), Error);
  CHECK_THROWS_AS(parse_location("home"), Error);
  try {
    parse_location("somewhere nice");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("somewhere nice") != std::string::npos);
  }
}

TEST_CASE("serialize_location round-trips every kind") {
  for (const auto& loc : {LocationExpr::home(), LocationExpr::original_of("plate"),
                          LocationExpr::current_of("scoop")}) {
    CHECK(parse_location(serialize_location(loc)) == loc);
  }
}

TEST_CASE("parse_step accepts the canonical single-quoted tuple") {
  const HighLevelStep step =
      parse_step("['pickup', 'original position of tomato', 'tomato', 'none']");
  CHECK(step.action == "pickup");
  CHECK(step.location == LocationExpr::original_of("tomato"));
  CHECK(step.object == "tomato");
  CHECK(step.tool == "");  // 'none' maps to empty
}

TEST_CASE("parse_step accepts LaTeX-style backquote openers") {
  // the form LLM transcripts actually contain: `phrase' with mixed quotes
  const HighLevelStep step =
      parse_step("[`pickup', `original position of tomato', `tomato', `none']");
  CHECK(step.action == "pickup");
  CHECK(step.location == LocationExpr::original_of("tomato"));
  CHECK(step.object == "tomato");
  CHECK(step.tool.empty());
  // double quotes work too
  const HighLevelStep dq = parse_step("[\"place\", \"robot home pose\", \"none\", \"hammer\"]");
  CHECK(dq.action == "place");
  CHECK(dq.location == LocationExpr::home());
  CHECK(dq.object.empty());
  CHECK(dq.tool == "hammer");
}

TEST_CASE("serialize_step uses single quotes and none placeholders") {
  HighLevelStep step;
  step.action = "scoop";
  step.location = LocationExpr::current_of("candies");
  step.object = "candies";
  step.tool = "scoop";
  CHECK(serialize_step(step) ==
        "['scoop', 'current position of candies', 'candies', 'scoop']");
  step.object.clear();
  step.tool.clear();
  CHECK(serialize_step(step) == "['scoop', 'current position of candies', 'none', 'none']");
}

TEST_CASE("fuzzed steps survive serialize then parse unchanged") {
  Rng rng(2024);
  const std::vector<std::string> words{"tomato", "bowl",  "scoop",   "dough",
                                       "plate",  "board", "candies", "flat tool"};
  auto pick_name = [&]() { return words[rng.uniform_int(0, (int)words.size() - 1)]; };
  for (int i = 0; i < 200; ++i) {
    HighLevelStep step;
    step.action = words[rng.uniform_int(0, (int)words.size() - 1)];
    switch (rng.uniform_int(0, 2)) {
      case 0: step.location = LocationExpr::home(); break;
      case 1: step.location = LocationExpr::original_of(pick_name()); break;
      default: step.location = LocationExpr::current_of(pick_name()); break;
    }
    if (rng.uniform() < 0.7) step.object = pick_name();
    if (rng.uniform() < 0.5) step.tool = pick_name();
    CAPTURE(serialize_step(step));
    CHECK(parse_step(serialize_step(step)) == step);
  }
}

TEST_CASE("malformed step tuples are rejected with diagnostics") {
  const std::vector<std::string> bad{
      "pickup, tomato",                                           // no brackets
      "['pickup', 'robot home pose', 'tomato']",                  // 3 phrases
      "['a', 'robot home pose', 'b', 'c', 'd']",                  // 5 phrases
      "[pickup, 'robot home pose', 'tomato', 'none']",            // unquoted phrase
      "['pickup' 'robot home pose' 'tomato' 'none']",             // missing commas
      "['pickup', 'robot home pose', 'tomato', 'none'",           // unterminated list
      "['pickup, 'robot home pose', 'tomato', 'none']",           // quote confusion
      "['pickup', 'nowhere in particular', 'tomato', 'none']",    // bad location
      "[]",                                                       // empty list
      "",                                                         // empty line
  };
  for (const auto& text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_step(text), Error);
    try {
      parse_step(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      CHECK(std::string(e.what()).size() > std::string("parse error: ").size());
    }
  }
}

TEST_CASE("parse_plan takes one step per nonempty line") {
  const std::string text =
      "['pickup', 'original position of tomato', 'tomato', 'none']\n"
      "\n"
      "['place', 'current position of bowl', 'tomato', 'none']\n";
  const auto steps = parse_plan(text);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].action == "pickup");
  CHECK(steps[1].action == "place");
  CHECK(parse_plan(serialize_plan(steps)) == steps);
  CHECK(parse_plan("").empty());
}

namespace {

std::vector<ObjectEntry> kitchen_entries() {
  return {{"tomato", false}, {"bowl", false}, {"spatula", true}};
}

}  // namespace

TEST_CASE("validate_plan accepts a well-formed plan") {
  const auto steps = parse_plan(
      "['pickup', 'original position of tomato', 'tomato', 'none']\n"
      "['place', 'current position of bowl', 'tomato', 'none']\n");
  CHECK(validate_plan(steps, kitchen_entries()).ok());
}

TEST_CASE("validate_plan reports every problem, not just the first") {
  HighLevelStep s0;  // empty action, unknown object
  s0.object = "ghost";
  HighLevelStep s1;
  s1.action = "place";
  s1.location = LocationExpr::current_of("phantom");  // unknown anchor
  s1.object = "tomato";
  s1.tool = "bowl";  // known, but not a tool
  HighLevelStep s2;
  s2.action = "wave";
  s2.tool = "wand";  // unknown tool
  const auto report = validate_plan({s0, s1, s2}, kitchen_entries());
  REQUIRE(report.issues.size() == 5);
  auto has = [&](int idx, const std::string& code) {
    for (const auto& d : report.issues)
      if (d.step_index == idx && d.code == code) return true;
    return false;
  };
  CHECK(has(0, "empty-action"));
  CHECK(has(0, "unknown-object"));
  CHECK(has(1, "tool-not-tool"));
  CHECK(has(1, "unknown-location-object"));
  CHECK(has(2, "unknown-tool"));
}

TEST_CASE("validate_plan flags an empty plan") {
  const auto report = validate_plan({}, kitchen_entries());
  REQUIRE(report.issues.size() == 1);
  CHECK(report.issues[0].code == "empty-plan");
  CHECK(report.issues[0].step_index == -1);
}

TEST_CASE("requires_tool_pickup routes only tool pickups to the grasp planner") {
  const auto entries = kitchen_entries();
  HighLevelStep step;
  step.action = "pickup";
  step.object = "spatula";
  CHECK(requires_tool_pickup(step, entries));
  step.object = "tomato";
  CHECK_FALSE(requires_tool_pickup(step, entries));  // not a tool
  step.action = "place";
  step.object = "spatula";
  CHECK_FALSE(requires_tool_pickup(step, entries));  // not a pickup
  step.action = "pickup";
  step.object = "";
  CHECK_FALSE(requires_tool_pickup(step, entries));
  step.object = "unknown";
  CHECK_FALSE(requires_tool_pickup(step, entries));
}
