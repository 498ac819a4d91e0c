#pragma once

#include <filesystem>
#include <string>

#include "tabletop/world/types.hpp"

namespace tabletop::world {

// Scene documents are JSON: a schema_version, a table height, an optional
// robot home pose, and a list of objects. Loading validates shapes and
// placement and leaves the robot parked at home with an open, empty gripper.
WorldState load_scene_text(const std::string& text);
WorldState load_scene_file(const std::filesystem::path& path);

// Document with the objects' current poses as the spawn poses. Keys are
// emitted in a fixed order and numbers in shortest round-trip form, so equal
// states serialize to identical bytes.
std::string serialize_scene(const WorldState& state);

// Full state including robot, attachment, effects, and motion bookkeeping.
// load_world(serialize_world(s)) reproduces s exactly.
std::string serialize_world(const WorldState& state);
WorldState load_world_text(const std::string& text);

void save_text_file(const std::filesystem::path& path, const std::string& text);
std::string load_text_file(const std::filesystem::path& path);

}  // namespace tabletop::world
