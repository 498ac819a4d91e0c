#include "tabletop/world/actions.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tabletop/common/errors.hpp"
#include "tabletop/common/strings.hpp"
#include "tabletop/world/geometry.hpp"

namespace tabletop::world {

namespace {

Pose pose_from_transform(const Eigen::Isometry3d& t) {
  Pose p;
  p.position = t.translation();
  const Eigen::Matrix3d R = t.linear();
  const double pitch = std::asin(std::clamp(-R(2, 0), -1.0, 1.0));
  double roll, yaw;
  if (std::abs(R(2, 0)) < 1.0 - 1e-12) {
    roll = std::atan2(R(2, 1), R(2, 2));
    yaw = std::atan2(R(1, 0), R(0, 0));
  } else {
    // straight up/down: fold everything into roll
    roll = std::atan2(-R(1, 2), R(1, 1));
    yaw = 0.0;
  }
  p.rpy_deg = {rad2deg(roll), rad2deg(pitch), rad2deg(yaw)};
  p.normalize_angles();
  return p;
}

// Names of every object transitively inside `root` (via contains sets).
std::set<std::string> containment_subtree(const WorldState& state, const std::string& root) {
  std::set<std::string> out;
  std::vector<std::string> queue{root};
  while (!queue.empty()) {
    const std::string cur = queue.back();
    queue.pop_back();
    for (const std::string& item : state.effects_of(cur).contains) {
      if (out.insert(item).second) queue.push_back(item);
    }
  }
  return out;
}

std::set<std::string> all_contained(const WorldState& state) {
  std::set<std::string> out;
  for (const auto& [holder, fx] : state.effects) {
    (void)holder;
    out.insert(fx.contains.begin(), fx.contains.end());
  }
  return out;
}

void translate_subtree(WorldState& state, const std::string& root, const Eigen::Vector3d& dv) {
  state.find(root)->pose.position += dv;
  for (const std::string& item : containment_subtree(state, root))
    state.find(item)->pose.position += dv;
}

void transform_subtree(WorldState& state, const std::string& root, const Eigen::Isometry3d& m) {
  SceneObject* obj = state.find(root);
  obj->pose = pose_from_transform(m * obj->pose.transform());
  for (const std::string& item : containment_subtree(state, root)) {
    SceneObject* o = state.find(item);
    o->pose = pose_from_transform(m * o->pose.transform());
  }
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

bool fits_inside(const SceneObject& item, const SceneObject& container, double margin = 0.005) {
  const Eigen::Vector3d is = object_aabb(item).size();
  const Eigen::Vector3d cs = object_aabb(container).size();
  return is.x() <= cs.x() - margin && is.y() <= cs.y() - margin;
}

// Puts `name` down at its current xy: on the tallest object under it, inside
// that object if it is a container with room, otherwise on the table.
// `exclude` names objects that cannot act as support (e.g. the tool in the
// gripper right above the drop point).
void settle_object(WorldState& state, const std::string& name, const Eigen::Vector2d& xy,
                   const ActionLimits& limits, std::vector<Event>& events,
                   const std::set<std::string>& exclude = {}) {
  SceneObject* obj = state.find(name);
  const std::set<std::string> subtree = containment_subtree(state, name);

  const SceneObject* support = nullptr;
  for (const auto& other : state.objects) {
    if (other.name == name || subtree.count(other.name) || exclude.count(other.name)) continue;
    if (!object_aabb(other).contains_xy(xy.x(), xy.y())) continue;
    if (!support || object_aabb(other).max.z() > object_aabb(*support).max.z()) support = &other;
  }

  const double center_to_bottom = obj->pose.position.z() - object_aabb(*obj).min.z();
  double bottom;
  std::string support_name = "table";
  if (support && support->category == Category::Container && fits_inside(*obj, *support)) {
    bottom = object_aabb(*support).min.z() + limits.container_floor_clearance;
    support_name = support->name;
    state.effects_of(support->name).contains.insert(name);
    events.push_back({"contained", {{"object", name}, {"container", support->name}}});
  } else if (support) {
    bottom = object_aabb(*support).max.z();
    support_name = support->name;
  } else {
    bottom = state.table_height;
  }

  const Eigen::Vector3d dv(xy.x() - obj->pose.position.x(), xy.y() - obj->pose.position.y(),
                           bottom + center_to_bottom - obj->pose.position.z());
  translate_subtree(state, name, dv);
  events.push_back({"settled", {{"object", name}, {"support", support_name}}});
}

// ---- tool effect rules ------------------------------------------------

struct HeldTool {
  SceneObject* obj;
  Eigen::Vector3d head_centroid;  // world, at the current tcp pose
  Aabb head_box;
};

// The held tool's head geometry; valid only while the attachment is rigid.
HeldTool held_tool_state(WorldState& state) {
  SceneObject* obj = state.find(state.robot.held->object);
  return {obj, obj->pose.transform() * head_centroid_local(*obj), head_aabb_world(*obj)};
}

void check_scoop_sweep(WorldState& state, const HeldTool& tool, const Eigen::Vector3d& offset,
                       std::vector<Event>& events) {
  const std::string& name = tool.obj->name;
  if (tool.obj->tool_class != ToolClass::Scoop) return;
  if (!state.effects_of(name).contains.empty()) return;
  const Eigen::Vector3d head = tool.head_centroid + offset;
  const std::set<std::string> contained = all_contained(state);
  for (const auto& other : state.objects) {
    if (other.category != Category::Granular || contained.count(other.name)) continue;
    const Aabb box = object_aabb(other);
    if (!box.contains_xy(head.x(), head.y())) continue;
    if (head.z() > box.max.z()) continue;
    auto& pending = state.trackers.pending_scoop[name];
    if (pending != other.name) {
      pending = other.name;
      events.push_back({"scoop_sweep", {{"material", other.name}, {"tool", name}}});
    }
    return;
  }
}

void flatten_object(WorldState& state, SceneObject& dough, const std::string& tool,
                    std::vector<Event>& events) {
  const Aabb box = object_aabb(dough);
  const double new_height = box.size().z() / 2.0;
  const double new_radius = (box.size().x() / 2.0) * std::sqrt(2.0);
  dough.shape = {make_cylinder(new_radius, new_height)};
  dough.pose.position.z() = state.table_height + new_height / 2.0;
  dough.pose.rpy_deg = {0, 0, 0};
  state.effects_of(dough.name).flattened = true;
  events.push_back({"flatten", {{"object", dough.name}, {"tool", tool}}});
}

void check_flatten(WorldState& state, const HeldTool& tool, const Eigen::Vector3d& offset,
                   const ActionLimits& limits, std::vector<Event>& events) {
  if (tool.obj->tool_class != ToolClass::Flattener) return;
  const Eigen::Vector3d head = tool.head_centroid + offset;
  const double head_bottom = tool.head_box.min.z() + offset.z();
  if (head_bottom - state.table_height > limits.flatten_clearance) return;
  for (auto& other : state.objects) {
    if (other.category != Category::Dough || state.effects_of(other.name).flattened) continue;
    if (!object_aabb(other).contains_xy(head.x(), head.y())) continue;
    flatten_object(state, other, tool.obj->name, events);
  }
}

void check_poke(WorldState& state, const HeldTool& tool, const Eigen::Vector3d& prev_offset,
                const Eigen::Vector3d& offset, std::vector<Event>& events) {
  if (tool.obj->category != Category::Pointed) return;
  const double tip_before = tool.head_box.min.z() + prev_offset.z();
  const double tip_now = tool.head_box.min.z() + offset.z();
  const Eigen::Vector3d head = tool.head_centroid + offset;
  for (auto& other : state.objects) {
    if (other.category != Category::Dough || !state.effects_of(other.name).flattened) continue;
    const Aabb box = object_aabb(other);
    if (!box.contains_xy(head.x(), head.y())) continue;
    if (tip_before > box.max.z() && tip_now <= box.max.z()) {
      auto& fx = state.effects_of(other.name);
      fx.holes_poked += 1;
      events.push_back({"poke",
                        {{"holes", std::to_string(fx.holes_poked)},
                         {"object", other.name},
                         {"tool", tool.obj->name}}});
    }
  }
}

void check_whisk_stroke(WorldState& state, const HeldTool& tool, const Eigen::Vector3d& start_offset,
                        const Eigen::Vector3d& end_offset, const ActionLimits& limits,
                        std::vector<Event>& events) {
  if (tool.obj->tool_class != ToolClass::Whisk) return;
  const Eigen::Vector3d h0 = tool.head_centroid + start_offset;
  const Eigen::Vector3d h1 = tool.head_centroid + end_offset;
  const std::string& name = tool.obj->name;
  for (const auto& other : state.objects) {
    if (other.category != Category::Container) continue;
    const Aabb box = object_aabb(other);
    if (!box.contains_xy(h0.x(), h0.y()) || !box.contains_xy(h1.x(), h1.y())) continue;
    if (h0.z() >= box.max.z() || h1.z() >= box.max.z()) continue;
    Eigen::Vector2d dir = (h1 - h0).head<2>();
    if (dir.norm() < 1e-9) return;
    dir.normalize();
    auto last = state.trackers.last_stroke.find(name);
    if (last != state.trackers.last_stroke.end() && last->second.dot(dir) < 0.0) {
      int& count = state.trackers.reversals[name][other.name];
      count += 1;
      auto& fx = state.effects_of(other.name);
      if (count >= limits.whisk_reversals && !fx.whisked) {
        fx.whisked = true;
        events.push_back({"whisk", {{"container", other.name}, {"tool", name}}});
      }
    }
    state.trackers.last_stroke[name] = dir;
    return;
  }
}

// Fired after a Tilt: a loaded scoop raised past the threshold picks the
// swept material up; tipped past it the other way, it lets the load out onto
// (or into) whatever sits under the head.
void check_scoop_transfer(WorldState& state, const ActionLimits& limits,
                          std::vector<Event>& events) {
  const HeldTool tool = held_tool_state(state);
  if (tool.obj->tool_class != ToolClass::Scoop) return;
  const std::string& name = tool.obj->name;
  const double elevation = head_elevation_deg(*tool.obj);
  auto& fx = state.effects_of(name);

  auto pending = state.trackers.pending_scoop.find(name);
  if (fx.contains.empty() && pending != state.trackers.pending_scoop.end() &&
      elevation >= limits.scoop_tilt_deg) {
    const std::string material = pending->second;
    state.trackers.pending_scoop.erase(pending);
    if (SceneObject* m = state.find(material)) {
      const Eigen::Vector3d dv = tool.head_centroid - m->pose.position;
      translate_subtree(state, material, dv);
      fx.contains.insert(material);
      events.push_back({"scoop_fill", {{"material", material}, {"tool", name}}});
    }
    return;
  }

  if (!fx.contains.empty() && elevation <= -limits.scoop_tilt_deg) {
    const std::vector<std::string> load(fx.contains.begin(), fx.contains.end());
    for (const std::string& item : load) {
      fx.contains.erase(item);
      events.push_back({"pour", {{"material", item}, {"tool", name}}});
      settle_object(state, item, tool.head_centroid.head<2>(), limits, events, {name});
    }
  }
}

}  // namespace

Eigen::Vector3d resolve_location(const WorldState& state, const plan::LocationExpr& loc) {
  switch (loc.kind) {
    case plan::LocationKind::Home:
      return state.robot.home.position;
    case plan::LocationKind::OriginalOf: {
      const SceneObject* obj = state.find(loc.object);
      if (!obj) throw Error(ErrorCode::ActionError, "unknown object '" + loc.object + "' in location");
      return obj->original_pose.position;
    }
    case plan::LocationKind::CurrentOf: {
      const SceneObject* obj = state.find(loc.object);
      if (!obj) throw Error(ErrorCode::ActionError, "unknown object '" + loc.object + "' in location");
      return obj->pose.position;
    }
  }
  throw Error(ErrorCode::ActionError, "bad location expression");
}

namespace {

void apply_goto(WorldState& state, const dsl::GoTo& go, const ActionLimits& limits,
                std::vector<Event>& events) {
  const Eigen::Vector3d delta(go.delta_cm[0] / 100.0, go.delta_cm[1] / 100.0,
                              go.delta_cm[2] / 100.0);
  const Eigen::Vector3d target = resolve_location(state, go.location) + delta;
  if (target.z() < state.table_height - 1e-9)
    throw Error(ErrorCode::ActionError,
                "move target is below the table (z = " + format_double(target.z()) + ")");

  const Eigen::Vector3d start = state.robot.tcp.position;
  const Eigen::Vector3d dv = target - start;

  if (state.robot.held) {
    const std::string& held = state.robot.held->object;
    // straight-line motion: minimum height is at an endpoint
    if (object_aabb(*state.find(held)).min.z() + std::min(dv.z(), 0.0) <
        state.table_height - 1e-9)
      throw Error(ErrorCode::ActionError, "held object '" + held + "' would be driven into the table");

    if (state.robot.held->in_grasp_region) {
      const HeldTool tool = held_tool_state(state);
      const int n = std::max(1, static_cast<int>(std::ceil(dv.norm() / limits.trajectory_step)));
      Eigen::Vector3d prev_offset = Eigen::Vector3d::Zero();
      for (int i = 0; i <= n; ++i) {
        const Eigen::Vector3d offset = dv * (static_cast<double>(i) / n);
        check_scoop_sweep(state, tool, offset, events);
        check_flatten(state, tool, offset, limits, events);
        if (i > 0) check_poke(state, tool, prev_offset, offset, events);
        prev_offset = offset;
      }
      check_whisk_stroke(state, tool, Eigen::Vector3d::Zero(), dv, limits, events);
    }
    translate_subtree(state, held, dv);
  }
  state.robot.tcp.position = target;
}

void apply_tilt(WorldState& state, const dsl::Tilt& tilt, const ActionLimits& limits,
                std::vector<Event>& events) {
  Pose new_tcp = state.robot.tcp;
  new_tcp.rpy_deg = {tilt.rpy_deg[0], tilt.rpy_deg[1], tilt.rpy_deg[2]};
  new_tcp.normalize_angles();

  if (state.robot.held) {
    const std::string& held = state.robot.held->object;
    const Eigen::Isometry3d obj_new = new_tcp.transform() * state.robot.held->tcp_to_object;
    Aabb future = {Eigen::Vector3d::Constant(1e30), Eigen::Vector3d::Constant(-1e30)};
    for (const auto& prim : state.find(held)->shape)
      future.merge(primitive_world_aabb(prim, obj_new));
    if (future.min.z() < state.table_height - 1e-9)
      throw Error(ErrorCode::ActionError, "held object '" + held + "' would be driven into the table");

    const Eigen::Isometry3d m = obj_new * state.find(held)->pose.transform().inverse();
    transform_subtree(state, held, m);
    state.robot.tcp = new_tcp;
    if (state.robot.held->in_grasp_region) check_scoop_transfer(state, limits, events);
  } else {
    state.robot.tcp = new_tcp;
  }
}

void apply_grasp(WorldState& state, const dsl::Grasp& grasp, const ActionLimits& limits,
                 std::vector<Event>& events) {
  if (grasp.state == 1) {
    if (!state.robot.gripper_open)
      throw Error(ErrorCode::ActionError, "gripper is already closed");
    state.robot.gripper_open = false;

    const std::set<std::string> contained = all_contained(state);
    const SceneObject* best = nullptr;
    ClosestPoint best_cp;
    for (const auto& obj : state.objects) {
      if (contained.count(obj.name)) continue;
      const ClosestPoint cp = closest_point(obj, state.robot.tcp.position);
      if (!best || cp.distance < best_cp.distance ||
          (cp.distance == best_cp.distance && obj.name < best->name)) {
        best = &obj;
        best_cp = cp;
      }
    }

    if (best && best_cp.distance <= limits.grasp_attach_dist &&
        grasp_width(best->shape[best_cp.primitive]) <= limits.max_jaw_opening) {
      Attachment att;
      att.object = best->name;
      att.tcp_to_object = state.robot.tcp.transform().inverse() * best->pose.transform();
      att.local_point = best_cp.local;
      att.in_grasp_region =
          best->grasp_region && best->grasp_region->contains(best_cp.local, limits.region_inflation);
      state.robot.held = att;
      events.push_back({"grasp_close",
                        {{"distance", format_double(best_cp.distance)},
                         {"in_grasp_region", bool_str(att.in_grasp_region)},
                         {"object", best->name}}});
    } else {
      events.push_back({"grasp_close", {{"object", "none"}}});
    }
    return;
  }

  // open
  if (state.robot.gripper_open)
    throw Error(ErrorCode::ActionError, "gripper is already open");
  state.robot.gripper_open = true;
  if (state.robot.held) {
    const std::string name = state.robot.held->object;
    state.robot.held.reset();
    state.trackers.pending_scoop.erase(name);
    state.trackers.last_stroke.erase(name);
    const Eigen::Vector2d xy = state.find(name)->pose.position.head<2>();
    events.push_back({"grasp_release", {{"object", name}}});
    settle_object(state, name, xy, limits, events);
  } else {
    events.push_back({"grasp_release", {{"object", "none"}}});
  }
}

}  // namespace

ApplyResult apply_action(const WorldState& state, const dsl::Action& action,
                         const ActionLimits& limits) {
  ApplyResult result{state, {}};
  if (const auto* go = std::get_if<dsl::GoTo>(&action)) {
    for (double d : go->delta_cm)
      if (std::abs(d) > limits.max_delta_cm)
        throw Error(ErrorCode::ActionError,
                    "move offset " + format_double(d) + " cm is outside the +/-" +
                        format_double(limits.max_delta_cm) + " cm envelope");
    apply_goto(result.state, *go, limits, result.events);
  } else if (const auto* tilt = std::get_if<dsl::Tilt>(&action)) {
    apply_tilt(result.state, *tilt, limits, result.events);
  } else if (const auto* grasp = std::get_if<dsl::Grasp>(&action)) {
    apply_grasp(result.state, *grasp, limits, result.events);
  }
  result.state.revision += 1;
  return result;
}

ApplyResult apply_sequence(const WorldState& state, const std::vector<dsl::Action>& actions,
                           const ActionLimits& limits) {
  ApplyResult result{state, {}};
  for (const auto& action : actions) {
    ApplyResult step = apply_action(result.state, action, limits);
    result.state = std::move(step.state);
    result.events.insert(result.events.end(), step.events.begin(), step.events.end());
  }
  return result;
}

double xy_circumradius(const SceneObject& obj) {
  const Eigen::Matrix3d R = obj.pose.rotation();
  double best = 0.0;
  for (const auto& prim : obj.shape) {
    const double off = (R * prim.offset).head<2>().norm();
    double r = 0.0;
    switch (prim.kind) {
      case ShapeKind::Box: r = 0.5 * std::hypot(prim.size.x(), prim.size.y()); break;
      case ShapeKind::Cylinder:
      case ShapeKind::Sphere: r = prim.radius(); break;
    }
    best = std::max(best, off + r);
  }
  return best;
}

namespace {

VerificationResult pass() { return {VerifyStatus::Pass, ""}; }
VerificationResult fail_check(std::string reason) {
  return {VerifyStatus::Fail, std::move(reason)};
}

VerificationResult verify_pickup(const WorldState& after, const plan::HighLevelStep& step) {
  if (step.object.empty()) return fail_check("pickup step names no object");
  if (!after.robot.held) return fail_check("nothing is held");
  if (after.robot.held->object != step.object)
    return fail_check("holding '" + after.robot.held->object + "' instead of '" + step.object + "'");
  return pass();
}

VerificationResult verify_place(const WorldState& before, const WorldState& after,
                                const plan::HighLevelStep& step, const ActionLimits& limits) {
  std::string subject = step.object;
  if (!step.tool.empty() && before.robot.held && before.robot.held->object == step.tool)
    subject = step.tool;
  if (subject.empty()) return fail_check("place step names nothing to put down");
  const SceneObject* obj = after.find(subject);
  if (!obj) return fail_check("unknown object '" + subject + "'");
  if (after.robot.held && after.robot.held->object == subject)
    return fail_check("'" + subject + "' is still in the gripper");

  if (step.location.kind != plan::LocationKind::Home) {
    const std::string& anchor = step.location.object;
    if (after.effects_of(anchor).contains.count(subject)) return pass();
  }

  Eigen::Vector3d ref;
  try {
    ref = resolve_location(after, step.location);
  } catch (const Error& e) {
    return fail_check(e.what());
  }
  double allowance = 0.0;
  if (step.location.kind != plan::LocationKind::Home)
    if (const SceneObject* anchor = after.find(step.location.object))
      if (anchor->name != subject) allowance = xy_circumradius(*anchor);

  const double d = (obj->pose.position.head<2>() - ref.head<2>()).norm();
  if (d <= allowance + limits.place_tolerance) return pass();
  return fail_check("'" + subject + "' ended " + format_double(d) + " m from the target point");
}

VerificationResult verify_rest_on(const WorldState& after, const std::string& item_name,
                                  const std::string& base_name, const ActionLimits& limits) {
  const SceneObject* item = after.find(item_name);
  const SceneObject* base = after.find(base_name);
  if (!item || !base) return fail_check("unknown object in step");
  if (after.effects_of(base_name).contains.count(item_name)) return pass();
  const Aabb bb = object_aabb(*base);
  const Aabb ib = object_aabb(*item);
  if (!bb.contains_xy(item->pose.position.x(), item->pose.position.y()))
    return fail_check("'" + item_name + "' is not over '" + base_name + "'");
  if (std::abs(ib.min.z() - bb.max.z()) > limits.pour_rest_tolerance)
    return fail_check("'" + item_name + "' does not rest on '" + base_name + "'");
  return pass();
}

}  // namespace

VerificationResult verify_step(const WorldState& before, const WorldState& after,
                               const plan::HighLevelStep& step, const ActionLimits& limits) {
  const std::string& verb = step.action;
  if (verb == "pickup") return verify_pickup(after, step);
  if (verb == "place") return verify_place(before, after, step, limits);
  if (verb == "scoop") {
    if (step.tool.empty()) return fail_check("scoop step names no tool");
    if (step.object.empty()) return fail_check("scoop step names no material");
    if (after.effects_of(step.tool).contains.count(step.object)) return pass();
    return fail_check("'" + step.tool + "' did not pick up '" + step.object + "'");
  }
  if (verb == "pour") {
    if (step.object.empty()) return fail_check("pour step names no material");
    if (step.location.kind == plan::LocationKind::Home)
      return {VerifyStatus::Unverifiable, "pour target is not an object"};
    const std::string& target = step.location.object;
    if (after.effects_of(target).contains.count(step.object)) return pass();
    return verify_rest_on(after, step.object, target, limits);
  }
  if (verb == "insert") {
    if (step.object.empty()) return fail_check("insert step names no object");
    if (step.location.kind == plan::LocationKind::Home)
      return {VerifyStatus::Unverifiable, "insert target is not an object"};
    if (after.effects_of(step.location.object).contains.count(step.object)) return pass();
    return fail_check("'" + step.object + "' did not end up inside '" + step.location.object + "'");
  }
  if (verb == "flatten") {
    if (step.object.empty()) return fail_check("flatten step names no object");
    if (after.effects_of(step.object).flattened) return pass();
    return fail_check("'" + step.object + "' is not flattened");
  }
  if (verb == "whisk") {
    if (step.object.empty()) return fail_check("whisk step names no container");
    if (after.effects_of(step.object).whisked) return pass();
    return fail_check("'" + step.object + "' was not whisked");
  }
  if (verb == "poke") {
    if (step.object.empty()) return fail_check("poke step names no object");
    if (after.effects_of(step.object).holes_poked > before.effects_of(step.object).holes_poked)
      return pass();
    return fail_check("no new holes in '" + step.object + "'");
  }
  return {VerifyStatus::Unverifiable, "no check rule for action '" + verb + "'"};
}

}  // namespace tabletop::world
