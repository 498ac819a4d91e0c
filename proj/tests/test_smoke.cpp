#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tabletop/dsl/actions.hpp"
#include "tabletop/fixtures/fixtures.hpp"
#include "tabletop/world/actions.hpp"

using namespace tabletop;

TEST_CASE("a canned scene accepts a hover move") {
  const auto scene = fixtures::scene_kitchen();
  const auto action = dsl::parse_action("Go-to: current position of tomato + (0, 0, 10) cm");
  const auto result = world::apply_action(scene, action);
  CHECK(result.state.robot.tcp.position.z() > scene.robot.tcp.position.z() - 1.0);
  CHECK(result.state.revision > scene.revision);
}
