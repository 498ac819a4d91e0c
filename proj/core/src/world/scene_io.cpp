#include "tabletop/world/scene_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tabletop/common/errors.hpp"
#include "tabletop/world/geometry.hpp"

namespace tabletop::world {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::SceneError, where + ": " + what);
}

const ordered_json& require(const ordered_json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

Eigen::Vector3d as_vec3(const ordered_json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number())
    fail(where, "expected an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ordered_json vec3_json(const Eigen::Vector3d& v) {
  return ordered_json::array({v.x(), v.y(), v.z()});
}

Pose pose_from_json(const ordered_json& j, const std::string& where) {
  Pose p;
  p.position = as_vec3(require(j, "position", where), where + ".position");
  if (j.contains("rpy_deg")) p.rpy_deg = as_vec3(j["rpy_deg"], where + ".rpy_deg");
  p.normalize_angles();
  return p;
}

ordered_json pose_json(const Pose& p) {
  ordered_json j;
  j["position"] = vec3_json(p.position);
  j["rpy_deg"] = vec3_json(p.rpy_deg);
  return j;
}

Primitive primitive_from_json(const ordered_json& j, const std::string& where) {
  const std::string kind = require(j, "kind", where).get<std::string>();
  Primitive prim;
  if (j.contains("offset")) prim.offset = as_vec3(j["offset"], where + ".offset");
  if (kind == "box") {
    const Eigen::Vector3d size = as_vec3(require(j, "size", where), where + ".size");
    if ((size.array() <= 0).any()) fail(where, "box dimensions must be positive");
    prim = make_box(size, prim.offset);
  } else if (kind == "cylinder") {
    const double r = require(j, "radius", where).get<double>();
    const double h = require(j, "height", where).get<double>();
    if (r <= 0 || h <= 0) fail(where, "cylinder radius and height must be positive");
    prim = make_cylinder(r, h, prim.offset);
  } else if (kind == "sphere") {
    const double r = require(j, "radius", where).get<double>();
    if (r <= 0) fail(where, "sphere radius must be positive");
    prim = make_sphere(r, prim.offset);
  } else {
    fail(where, "unknown shape kind '" + kind + "'");
  }
  return prim;
}

ordered_json primitive_json(const Primitive& p) {
  ordered_json j;
  switch (p.kind) {
    case ShapeKind::Box:
      j["kind"] = "box";
      j["size"] = vec3_json(p.size);
      break;
    case ShapeKind::Cylinder:
      j["kind"] = "cylinder";
      j["radius"] = p.radius();
      j["height"] = p.height();
      break;
    case ShapeKind::Sphere:
      j["kind"] = "sphere";
      j["radius"] = p.radius();
      break;
  }
  j["offset"] = vec3_json(p.offset);
  return j;
}

SceneObject object_from_json(const ordered_json& j, const std::string& where) {
  SceneObject obj;
  obj.name = require(j, "name", where).get<std::string>();
  if (obj.name.empty()) fail(where, "object name is empty");
  if (obj.name == "none") fail(where, "'none' is a reserved name");
  for (char c : obj.name)
    if (c == '\'' || c == '"' || c == '`' || c == '[' || c == ']' || c == ',' || c == ':' ||
        c == '\n')
      fail(where, "object name '" + obj.name + "' contains a forbidden character");

  const auto& shapes = require(j, "shape", where);
  if (!shapes.is_array() || shapes.empty()) fail(where, "shape must be a nonempty array");
  for (size_t i = 0; i < shapes.size(); ++i)
    obj.shape.push_back(primitive_from_json(shapes[i], where + ".shape[" + std::to_string(i) + "]"));

  obj.pose = pose_from_json(require(j, "pose", where), where + ".pose");
  obj.original_pose = j.contains("original_pose")
                          ? pose_from_json(j["original_pose"], where + ".original_pose")
                          : obj.pose;

  obj.is_tool = j.value("is_tool", false);
  if (j.contains("tool_class")) {
    const auto tc = tool_class_from_name(j["tool_class"].get<std::string>());
    if (!tc) fail(where, "unknown tool_class '" + j["tool_class"].get<std::string>() + "'");
    obj.tool_class = *tc;
  }
  if (j.contains("grasp_region")) {
    const auto& r = j["grasp_region"];
    GraspRegion region;
    region.center = as_vec3(require(r, "center", where + ".grasp_region"), where + ".grasp_region.center");
    region.size = as_vec3(require(r, "size", where + ".grasp_region"), where + ".grasp_region.size");
    if ((region.size.array() <= 0).any()) fail(where, "grasp_region size must be positive");
    obj.grasp_region = region;
  }
  if (obj.is_tool != obj.grasp_region.has_value())
    fail(where, "objects are tools exactly when they declare a grasp_region");
  if (obj.is_tool && !obj.tool_class) obj.tool_class = ToolClass::Other;

  if (j.contains("category")) {
    const auto c = category_from_name(j["category"].get<std::string>());
    if (!c) fail(where, "unknown category '" + j["category"].get<std::string>() + "'");
    obj.category = *c;
  }
  return obj;
}

ordered_json object_json(const SceneObject& obj) {
  ordered_json j;
  j["name"] = obj.name;
  if (obj.category != Category::Rigid) j["category"] = std::string(category_name(obj.category));
  j["is_tool"] = obj.is_tool;
  if (obj.tool_class) j["tool_class"] = std::string(tool_class_name(*obj.tool_class));
  j["pose"] = pose_json(obj.pose);
  j["original_pose"] = pose_json(obj.original_pose);
  ordered_json shapes = ordered_json::array();
  for (const auto& p : obj.shape) shapes.push_back(primitive_json(p));
  j["shape"] = shapes;
  if (obj.grasp_region) {
    ordered_json r;
    r["center"] = vec3_json(obj.grasp_region->center);
    r["size"] = vec3_json(obj.grasp_region->size);
    j["grasp_region"] = r;
  }
  return j;
}

ordered_json parse_json(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
}

void validate_placement(const WorldState& state) {
  std::set<std::string> names;
  for (const auto& obj : state.objects) {
    if (!names.insert(obj.name).second)
      fail("scene", "duplicate object name '" + obj.name + "'");
    const Aabb box = object_aabb(obj);
    if (box.min.z() < state.table_height - 1e-6)
      fail("object '" + obj.name + "'", "extends below the table surface");
  }
}

}  // namespace

WorldState load_scene_text(const std::string& text) {
  const ordered_json j = parse_json(text);
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
    fail("scene", "missing schema_version");
  if (j["schema_version"].get<int>() != kSchemaVersion)
    fail("scene", "unsupported schema_version " + j["schema_version"].dump());

  WorldState state;
  state.table_height = j.value("table_height", 0.0);
  state.robot.home = default_home_pose();
  if (j.contains("robot") && j["robot"].contains("home"))
    state.robot.home = pose_from_json(j["robot"]["home"], "robot.home");
  state.robot.tcp = state.robot.home;
  state.robot.gripper_open = true;
  state.robot.held.reset();

  const auto& objs = require(j, "objects", "scene");
  if (!objs.is_array()) fail("scene", "objects must be an array");
  for (size_t i = 0; i < objs.size(); ++i)
    state.objects.push_back(object_from_json(objs[i], "objects[" + std::to_string(i) + "]"));

  validate_placement(state);
  return state;
}

WorldState load_scene_file(const std::filesystem::path& path) {
  return load_scene_text(load_text_file(path));
}

std::string serialize_scene(const WorldState& state) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["table_height"] = state.table_height;
  ordered_json robot;
  robot["home"] = pose_json(state.robot.home);
  j["robot"] = robot;
  ordered_json objs = ordered_json::array();
  for (const auto& o : state.objects) objs.push_back(object_json(o));
  j["objects"] = objs;
  return j.dump(2) + "\n";
}

namespace {

ordered_json isometry_json(const Eigen::Isometry3d& t) {
  ordered_json j = ordered_json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) j.push_back(t.matrix()(r, c));
  return j;
}

Eigen::Isometry3d isometry_from_json(const ordered_json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 16) fail(where, "expected 16 numbers");
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = j[r * 4 + c].get<double>();
  Eigen::Isometry3d t;
  t.matrix() = m;
  return t;
}

}  // namespace

std::string serialize_world(const WorldState& state) {
  ordered_json j = parse_json(serialize_scene(state));
  ordered_json robot = j["robot"];
  robot["tcp"] = pose_json(state.robot.tcp);
  robot["gripper_open"] = state.robot.gripper_open;
  if (state.robot.held) {
    ordered_json held;
    held["object"] = state.robot.held->object;
    held["tcp_to_object"] = isometry_json(state.robot.held->tcp_to_object);
    held["local_point"] = vec3_json(state.robot.held->local_point);
    held["in_grasp_region"] = state.robot.held->in_grasp_region;
    robot["held"] = held;
  }
  j["robot"] = robot;

  ordered_json effects = ordered_json::object();
  for (const auto& [name, fx] : state.effects) {
    if (!fx.any()) continue;
    ordered_json e;
    e["flattened"] = fx.flattened;
    e["whisked"] = fx.whisked;
    e["holes_poked"] = fx.holes_poked;
    e["contains"] = ordered_json(fx.contains);
    effects[name] = e;
  }
  j["effects"] = effects;

  ordered_json trackers;
  trackers["pending_scoop"] = ordered_json(state.trackers.pending_scoop);
  ordered_json strokes = ordered_json::object();
  for (const auto& [tool, dir] : state.trackers.last_stroke)
    strokes[tool] = ordered_json::array({dir.x(), dir.y()});
  trackers["last_stroke"] = strokes;
  trackers["reversals"] = ordered_json(state.trackers.reversals);
  j["trackers"] = trackers;

  j["revision"] = state.revision;
  return j.dump(2) + "\n";
}

WorldState load_world_text(const std::string& text) {
  WorldState state = load_scene_text(text);
  const ordered_json j = parse_json(text);

  const auto& robot = require(j, "robot", "world");
  if (robot.contains("tcp")) state.robot.tcp = pose_from_json(robot["tcp"], "robot.tcp");
  state.robot.gripper_open = robot.value("gripper_open", true);
  if (robot.contains("held")) {
    const auto& h = robot["held"];
    Attachment att;
    att.object = require(h, "object", "robot.held").get<std::string>();
    if (!state.find(att.object)) fail("robot.held", "references unknown object '" + att.object + "'");
    att.tcp_to_object = isometry_from_json(require(h, "tcp_to_object", "robot.held"), "robot.held.tcp_to_object");
    att.local_point = as_vec3(require(h, "local_point", "robot.held"), "robot.held.local_point");
    att.in_grasp_region = h.value("in_grasp_region", false);
    state.robot.held = att;
  }

  if (j.contains("effects")) {
    for (const auto& [name, e] : j["effects"].items()) {
      if (!state.find(name)) fail("effects", "references unknown object '" + name + "'");
      ObjectEffects fx;
      fx.flattened = e.value("flattened", false);
      fx.whisked = e.value("whisked", false);
      fx.holes_poked = e.value("holes_poked", 0);
      if (e.contains("contains"))
        for (const auto& item : e["contains"]) fx.contains.insert(item.get<std::string>());
      state.effects[name] = fx;
    }
  }

  if (j.contains("trackers")) {
    const auto& t = j["trackers"];
    if (t.contains("pending_scoop"))
      for (const auto& [k, v] : t["pending_scoop"].items())
        state.trackers.pending_scoop[k] = v.get<std::string>();
    if (t.contains("last_stroke"))
      for (const auto& [k, v] : t["last_stroke"].items())
        state.trackers.last_stroke[k] = Eigen::Vector2d(v[0].get<double>(), v[1].get<double>());
    if (t.contains("reversals"))
      for (const auto& [tool, per] : t["reversals"].items())
        for (const auto& [bowl, n] : per.items())
          state.trackers.reversals[tool][bowl] = n.get<int>();
  }

  state.revision = j.value("revision", 0ull);
  return state;
}

void save_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

std::string load_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tabletop::world
