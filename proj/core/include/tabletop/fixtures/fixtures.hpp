#pragma once

#include <string>
#include <vector>

#include "tabletop/common/rng.hpp"
#include "tabletop/perception/pipeline.hpp"
#include "tabletop/world/types.hpp"

namespace tabletop::fixtures {

// Catalog objects. Every local frame is centered on the object's bounding
// box, so an object's pose position coincides with what the vision stack
// measures for it. Tools spawn axis-aligned (handle along +x where they have
// one); x/y place the object on the table at the right resting height.

world::SceneObject make_scoop(const std::string& name, double x, double y);
world::SceneObject make_spatula(const std::string& name, double x, double y);
world::SceneObject make_flattener(const std::string& name, double x, double y);
world::SceneObject make_whisk(const std::string& name, double x, double y);
world::SceneObject make_poker(const std::string& name, double x, double y);
world::SceneObject make_hammer(const std::string& name, double x, double y);

world::SceneObject make_tomato(const std::string& name, double x, double y);
world::SceneObject make_bowl(const std::string& name, double x, double y);
world::SceneObject make_plate(const std::string& name, double x, double y);
world::SceneObject make_candies(const std::string& name, double x, double y);
world::SceneObject make_dough(const std::string& name, double x, double y);
world::SceneObject make_board(const std::string& name, double x, double y);

// Everything with a grasp region, for building the grasp database. The
// poker is deliberately absent: it exercises the whole-silhouette fallback.
std::vector<world::SceneObject> db_tool_catalog();

// Four fixed cameras on a ring around the workspace, looking at its center
// from a shallow elevation, plus default detector/fusion/denoise settings.
perception::PerceptionConfig default_rig();

// Canonical task scenes. The robot starts at home with an open gripper.
world::WorldState scene_kitchen();        // tomato, bowl, plate, spatula
world::WorldState scene_scoop_candy();    // scoop, candies, plate
world::WorldState scene_flatten();        // flattener, dough, tomato
world::WorldState scene_whisk();          // whisk, bowl, tomato
world::WorldState scene_scoop_to_bowl();  // scoop, candies, bowl
world::WorldState scene_flatten_poke();   // flattener, poker, dough
world::WorldState scene_scoop_to_dough(); // flattener, scoop, spatula, candies, dough
world::WorldState scene_place_board();    // hammer, board

std::vector<world::WorldState> all_scenes();

// Jitters every object's x/y by up to `amplitude`, keeping all pairwise
// center distances at or above `min_separation` (rejection sampling on the
// whole configuration). Orientations are untouched.
world::WorldState randomize_scene(const world::WorldState& base, Rng& rng,
                                  double amplitude = 0.03, double min_separation = 0.12);

}  // namespace tabletop::fixtures
