#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tabletop/common/errors.hpp"
#include "tabletop/common/rng.hpp"
#include "tabletop/dsl/actions.hpp"
#include "tabletop/fixtures/fixtures.hpp"
#include "tabletop/world/actions.hpp"
#include "tabletop/world/geometry.hpp"
#include "tabletop/world/scene_io.hpp"
#include "tabletop/world/types.hpp"

using namespace tabletop;
using namespace tabletop::world;

namespace {

Pose random_pose(Rng& rng) {
  Pose p;
  p.position = {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.0, 0.3)};
  p.rpy_deg = {rng.uniform(-180, 180), rng.uniform(-180, 180), rng.uniform(-180, 180)};
  return p;
}

Primitive random_primitive(Rng& rng) {
  const Eigen::Vector3d size(rng.uniform(0.02, 0.15), rng.uniform(0.02, 0.15),
                             rng.uniform(0.02, 0.15));
  const Eigen::Vector3d offset(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05),
                               rng.uniform(-0.05, 0.05));
  switch (rng.uniform_int(0, 2)) {
    case 0: return make_box(size, offset);
    case 1: return make_cylinder(size.x() / 2, size.z(), offset);
    default: return make_sphere(size.x() / 2, offset);
  }
}

// dense points on the primitive surface, in the primitive's local frame
std::vector<Eigen::Vector3d> surface_samples(const Primitive& prim, int n) {
  std::vector<Eigen::Vector3d> pts;
  Rng rng(77);
  const Eigen::Vector3d h = prim.size / 2;
  for (int i = 0; i < n; ++i) {
    switch (prim.kind) {
      case ShapeKind::Box: {
        Eigen::Vector3d p(rng.uniform(-h.x(), h.x()), rng.uniform(-h.y(), h.y()),
                          rng.uniform(-h.z(), h.z()));
        const int axis = rng.uniform_int(0, 2);
        p[axis] = rng.uniform() < 0.5 ? -h[axis] : h[axis];  // pin to a face
        pts.push_back(prim.offset + p);
        break;
      }
      case ShapeKind::Cylinder: {
        const double a = rng.uniform(0, 2 * kPi);
        if (rng.uniform() < 0.5) {
          pts.push_back(prim.offset + Eigen::Vector3d(prim.radius() * std::cos(a),
                                                      prim.radius() * std::sin(a),
                                                      rng.uniform(-h.z(), h.z())));
        } else {
          const double r = prim.radius() * std::sqrt(rng.uniform());
          pts.push_back(prim.offset +
                        Eigen::Vector3d(r * std::cos(a), r * std::sin(a),
                                        rng.uniform() < 0.5 ? -h.z() : h.z()));
        }
        break;
      }
      case ShapeKind::Sphere: {
        const double z = rng.uniform(-1.0, 1.0);
        const double a = rng.uniform(0, 2 * kPi);
        const double s = std::sqrt(1 - z * z);
        pts.push_back(prim.offset +
                      prim.radius() * Eigen::Vector3d(s * std::cos(a), s * std::sin(a), z));
        break;
      }
    }
  }
  return pts;
}

bool inside_primitive(const Primitive& prim, const Eigen::Vector3d& local) {
  const Eigen::Vector3d d = local - prim.offset;
  const Eigen::Vector3d h = prim.size / 2;
  switch (prim.kind) {
    case ShapeKind::Box:
      return std::abs(d.x()) <= h.x() && std::abs(d.y()) <= h.y() && std::abs(d.z()) <= h.z();
    case ShapeKind::Cylinder:
      return d.head<2>().norm() <= prim.radius() && std::abs(d.z()) <= h.z();
    case ShapeKind::Sphere:
      return d.norm() <= prim.radius();
  }
  return false;
}

bool inside_object(const SceneObject& obj, const Eigen::Vector3d& world) {
  const Eigen::Vector3d local = obj.pose.transform().inverse() * world;
  for (const auto& prim : obj.shape)
    if (inside_primitive(prim, local)) return true;
  return false;
}

}  // namespace

TEST_CASE("pose rotation applies yaw, then pitch, then roll") {
  Pose p;
  p.rpy_deg = {0, 0, 90};
  CHECK((p.rotation() * Eigen::Vector3d::UnitX()).isApprox(Eigen::Vector3d::UnitY(), 1e-12));
  p.rpy_deg = {90, 0, 0};
  CHECK((p.rotation() * Eigen::Vector3d::UnitY()).isApprox(Eigen::Vector3d::UnitZ(), 1e-12));
  // Rz * Rx composition order
  p.rpy_deg = {90, 0, 90};
  CHECK((p.rotation() * Eigen::Vector3d::UnitY()).isApprox(Eigen::Vector3d::UnitZ(), 1e-12));
  CHECK((p.rotation() * Eigen::Vector3d::UnitZ()).isApprox(Eigen::Vector3d::UnitX(), 1e-12));
}

TEST_CASE("rotated box aabb equals the max over transformed corners") {
  Rng rng(31);
  for (int round = 0; round < 40; ++round) {
    const Eigen::Vector3d size(rng.uniform(0.01, 0.2), rng.uniform(0.01, 0.2),
                               rng.uniform(0.01, 0.2));
    const Eigen::Vector3d offset(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1),
                                 rng.uniform(-0.1, 0.1));
    const Primitive box = make_box(size, offset);
    const Pose pose = random_pose(rng);
    const Eigen::Isometry3d t = pose.transform();

    Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e30);
    Eigen::Vector3d hi = Eigen::Vector3d::Constant(-1e30);
    for (int corner = 0; corner < 8; ++corner) {
      Eigen::Vector3d c = offset;
      for (int axis = 0; axis < 3; ++axis)
        c[axis] += ((corner >> axis) & 1 ? 0.5 : -0.5) * size[axis];
      const Eigen::Vector3d w = t * c;
      lo = lo.cwiseMin(w);
      hi = hi.cwiseMax(w);
    }
    const Aabb got = primitive_world_aabb(box, t);
    CHECK(got.min.isApprox(lo, 1e-9));
    CHECK(got.max.isApprox(hi, 1e-9));
  }
}

TEST_CASE("world aabb contains and is touched by dense surface samples") {
  Rng rng(32);
  for (int round = 0; round < 30; ++round) {
    const Primitive prim = random_primitive(rng);
    const Pose pose = random_pose(rng);
    const Eigen::Isometry3d t = pose.transform();
    const Aabb box = primitive_world_aabb(prim, t);

    Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e30);
    Eigen::Vector3d hi = Eigen::Vector3d::Constant(-1e30);
    for (const auto& local : surface_samples(prim, 4000)) {
      const Eigen::Vector3d w = t * local;
      lo = lo.cwiseMin(w);
      hi = hi.cwiseMax(w);
      for (int axis = 0; axis < 3; ++axis) {
        REQUIRE(w[axis] >= box.min[axis] - 1e-9);
        REQUIRE(w[axis] <= box.max[axis] + 1e-9);
      }
    }
    // with 4000 samples every face should be approached to a few mm
    for (int axis = 0; axis < 3; ++axis) {
      CHECK(lo[axis] - box.min[axis] < 0.01);
      CHECK(box.max[axis] - hi[axis] < 0.01);
    }
  }
}

TEST_CASE("primitive volumes") {
  CHECK(primitive_volume(make_box({0.1, 0.2, 0.3})) == doctest::Approx(0.006));
  CHECK(primitive_volume(make_cylinder(0.05, 0.1)) == doctest::Approx(kPi * 0.0025 * 0.1));
  CHECK(primitive_volume(make_sphere(0.05)) ==
        doctest::Approx(4.0 / 3.0 * kPi * 0.05 * 0.05 * 0.05));
}

TEST_CASE("object centroid weights pieces by volume") {
  SceneObject obj;
  obj.name = "dumbbell";
  // 8x volume ratio: centroid sits at 8/9 of the way toward the big cube
  obj.shape = {make_box({0.02, 0.02, 0.02}, {0, 0, 0}), make_box({0.04, 0.04, 0.04}, {0.09, 0, 0})};
  obj.pose.position = {1.0, 2.0, 3.0};
  const Eigen::Vector3d c = object_centroid_world(obj);
  CHECK(c.x() == doctest::Approx(1.0 + 0.09 * 8.0 / 9.0));
  CHECK(c.y() == doctest::Approx(2.0));
  CHECK(c.z() == doctest::Approx(3.0));
}

TEST_CASE("closest_point agrees with dense surface sampling") {
  Rng rng(33);
  for (int round = 0; round < 15; ++round) {
    SceneObject obj;
    obj.name = "blob";
    obj.shape = {random_primitive(rng)};
    if (rng.uniform() < 0.5) obj.shape.push_back(random_primitive(rng));
    obj.pose = random_pose(rng);

    for (int q = 0; q < 8; ++q) {
      const Eigen::Vector3d query(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                                  rng.uniform(-0.3, 0.6));
      const ClosestPoint got = closest_point(obj, query);
      if (inside_object(obj, query)) {
        CHECK(got.distance == 0.0);
        continue;
      }
      double best = 1e30;
      const Eigen::Isometry3d t = obj.pose.transform();
      for (const auto& prim : obj.shape)
        for (const auto& local : surface_samples(prim, 6000))
          best = std::min(best, (t * local - query).norm());
      // sampled minimum can only overestimate the true distance
      CHECK(got.distance <= best + 1e-9);
      CHECK(got.distance >= best - 0.01);
      // the reported witness point lies on the object at the reported distance
      CHECK((got.world - query).norm() == doctest::Approx(got.distance).epsilon(1e-9));
      REQUIRE(got.primitive >= 0);
      REQUIRE(got.primitive < (int)obj.shape.size());
    }
  }
}

TEST_CASE("closest_point exact axis-aligned cases") {
  SceneObject obj;
  obj.name = "crate";
  obj.shape = {make_box({0.1, 0.1, 0.1})};
  obj.pose.position = {0, 0, 0.05};
  const ClosestPoint above = closest_point(obj, {0, 0, 0.20});
  CHECK(above.distance == doctest::Approx(0.10));
  CHECK(above.world.isApprox(Eigen::Vector3d(0, 0, 0.10), 1e-12));
  CHECK(above.local.isApprox(Eigen::Vector3d(0, 0, 0.05), 1e-12));
  const ClosestPoint corner = closest_point(obj, {0.15, 0.15, 0.05});
  CHECK(corner.distance == doctest::Approx(0.1 * std::sqrt(2.0)));
  CHECK(closest_point(obj, {0, 0, 0.05}).distance == 0.0);
}

TEST_CASE("ray_hit matches a marching oracle") {
  Rng rng(34);
  int hits = 0;
  for (int round = 0; round < 40; ++round) {
    SceneObject obj;
    obj.name = "target";
    obj.shape = {random_primitive(rng)};
    obj.pose = random_pose(rng);

    const Eigen::Vector3d origin(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4),
                                 rng.uniform(0.4, 0.8));
    // aim at the body center so a fair share of rays connect
    Eigen::Vector3d dir = obj.pose.transform() * obj.shape[0].offset - origin;
    dir += Eigen::Vector3d(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1));

    const auto got = ray_hit(obj, origin, dir);

    const double step = 1e-4;
    std::optional<double> marched;
    for (double t = step; t < 3.0; t += step) {
      if (inside_object(obj, origin + t * dir)) {
        marched = t;
        break;
      }
    }
    CAPTURE(round);
    if (marched.has_value()) {
      REQUIRE(got.has_value());
      CHECK(*got <= *marched + 1e-9);
      CHECK(*got >= *marched - step);
      ++hits;
    } else if (got.has_value()) {
      CHECK(*got >= 3.0);  // only acceptable miss: beyond the marched range
    }
  }
  CHECK(hits > 10);
}

TEST_CASE("ray_hit exact analytic cases") {
  SceneObject ball;
  ball.name = "ball";
  ball.shape = {make_sphere(0.02)};
  ball.pose.position = {0.4, 0.0, 0.02};
  // straight down through the center: hits the top of the sphere
  const auto t = ray_hit(ball, {0.4, 0.0, 0.52}, {0, 0, -1});
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(0.48).epsilon(1e-9));
  CHECK_FALSE(ray_hit(ball, {0.5, 0.0, 0.52}, {0, 0, -1}).has_value());
  // ray pointing away
  CHECK_FALSE(ray_hit(ball, {0.4, 0.0, 0.52}, {0, 0, 1}).has_value());
}

TEST_CASE("ray_hit_region tests the grasp-region box") {
  const SceneObject scoop = fixtures::make_scoop("scoop", 0.4, 0.0);
  // over the handle: region spans x in [0.39, 0.48] around the object origin
  CHECK(ray_hit_region(scoop, {0.435, 0.0, 0.5}, {0, 0, -1}).has_value());
  // over the head: solid hit but not region
  CHECK(ray_hit(scoop, {0.35, 0.0, 0.5}, {0, 0, -1}).has_value());
  CHECK_FALSE(ray_hit_region(scoop, {0.35, 0.0, 0.5}, {0, 0, -1}).has_value());
}

TEST_CASE("grasp_width is the smaller horizontal extent") {
  CHECK(grasp_width(make_box({0.2, 0.15, 0.01})) == 0.15);
  CHECK(grasp_width(make_box({0.01, 0.3, 0.05})) == 0.01);
  CHECK(grasp_width(make_cylinder(0.05, 0.1)) == doctest::Approx(0.10));
  CHECK(grasp_width(make_sphere(0.02)) == doctest::Approx(0.04));
}

TEST_CASE("tool anatomy splits head from handle by the grasp region") {
  const SceneObject scoop = fixtures::make_scoop("scoop", 0.0, 0.0);
  REQUIRE(scoop.shape.size() == 2);
  CHECK(is_head_primitive(scoop, 0));        // blade box at -x
  CHECK_FALSE(is_head_primitive(scoop, 1));  // handle inside the region
  CHECK(head_centroid_local(scoop).isApprox(Eigen::Vector3d(-0.05, 0, 0), 1e-12));
  CHECK(handle_centroid_local(scoop).isApprox(Eigen::Vector3d(0.03, 0, 0), 1e-12));
  CHECK(head_direction_world(scoop).isApprox(-Eigen::Vector3d::UnitX(), 1e-12));
  CHECK(head_elevation_deg(scoop) == doctest::Approx(0.0));

  SceneObject no_region;
  no_region.name = "lump";
  no_region.shape = {make_box({0.02, 0.02, 0.02})};
  CHECK(is_head_primitive(no_region, 0));  // everything is head without a region
}

TEST_CASE("pitching the wrist raises a -x head by the same angle") {
  SceneObject scoop = fixtures::make_scoop("scoop", 0.0, 0.0);
  scoop.pose.rpy_deg = {0, 35, 0};
  CHECK(head_elevation_deg(scoop) == doctest::Approx(35.0).epsilon(1e-9));
  scoop.pose.rpy_deg = {0, -35, 0};
  CHECK(head_elevation_deg(scoop) == doctest::Approx(-35.0).epsilon(1e-9));
}

TEST_CASE("xy_circumradius covers the farthest piece") {
  SceneObject obj;
  obj.name = "wide";
  obj.shape = {make_box({0.06, 0.08, 0.02})};
  CHECK(xy_circumradius(obj) == doctest::Approx(0.05));  // half diagonal
  obj.shape.push_back(make_sphere(0.01, {0.10, 0, 0}));
  CHECK(xy_circumradius(obj) == doctest::Approx(0.11));
}

// ---- scene and world serialization -------------------------------------

TEST_CASE("scene documents round-trip exactly") {
  const WorldState scene = fixtures::scene_kitchen();
  const std::string text = serialize_scene(scene);
  const WorldState again = load_scene_text(text);
  CHECK(serialize_scene(again) == text);  // byte-stable
  REQUIRE(again.objects.size() == scene.objects.size());
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& a = scene.objects[i];
    const SceneObject& b = again.objects[i];
    CHECK(a.name == b.name);
    CHECK(a.is_tool == b.is_tool);
    CHECK(a.category == b.category);
    CHECK(a.tool_class == b.tool_class);
    CHECK(a.pose.position.isApprox(b.pose.position, 1e-15));
    CHECK(a.shape.size() == b.shape.size());
    CHECK(a.grasp_region.has_value() == b.grasp_region.has_value());
  }
  CHECK(again.robot.gripper_open);
  CHECK_FALSE(again.robot.held.has_value());
}

TEST_CASE("full world documents are reproduced field for field") {
  WorldState state = fixtures::scene_scoop_candy();
  // exercise attachment, effects, and trackers
  state.robot.tcp.position = {0.39, -0.14, 0.018};
  state.robot.gripper_open = false;
  Attachment att;
  att.object = "scoop";
  att.tcp_to_object = Eigen::Translation3d(0.01, 0.02, -0.008) *
                      Eigen::AngleAxisd(deg2rad(30), Eigen::Vector3d::UnitZ());
  att.local_point = {0.03, 0, 0.008};
  att.in_grasp_region = true;
  state.robot.held = att;
  state.effects_of("scoop").contains.insert("candies");
  state.effects_of("plate").flattened = true;
  state.effects_of("plate").holes_poked = 2;
  state.trackers.pending_scoop["scoop"] = "candies";
  state.trackers.last_stroke["whisk"] = Eigen::Vector2d(0.6, -0.8);
  state.trackers.reversals["whisk"]["bowl"] = 2;
  state.revision = 17;

  const std::string text = serialize_world(state);
  const WorldState back = load_world_text(text);
  CHECK(serialize_world(back) == text);
  REQUIRE(back.robot.held.has_value());
  CHECK(back.robot.held->object == "scoop");
  CHECK(back.robot.held->in_grasp_region);
  CHECK(back.robot.held->local_point.isApprox(att.local_point, 1e-15));
  CHECK(back.robot.held->tcp_to_object.matrix().isApprox(att.tcp_to_object.matrix(), 1e-15));
  CHECK_FALSE(back.robot.gripper_open);
  CHECK(back.effects_of("scoop").contains.count("candies") == 1);
  CHECK(back.effects_of("plate").flattened);
  CHECK(back.effects_of("plate").holes_poked == 2);
  CHECK(back.trackers.pending_scoop.at("scoop") == "candies");
  CHECK(back.trackers.last_stroke.at("whisk").isApprox(Eigen::Vector2d(0.6, -0.8), 1e-15));
  CHECK(back.trackers.reversals.at("whisk").at("bowl") == 2);
  CHECK(back.revision == 17);
}

TEST_CASE("scene loader rejects malformed documents") {
  auto scene_with_objects = [](const std::string& objects) {
    return R"({"schema_version": 1, "table_height": 0, "objects": [)" + objects + "]}";
  };
  const std::string ball =
      R"({"name": "ball", "shape": [{"kind": "sphere", "radius": 0.02}],
          "pose": {"position": [0, 0, 0.02]}})";

  CHECK_THROWS_AS(load_scene_text("not json"), Error);
  CHECK_THROWS_AS(load_scene_text(R"({"objects": []})"), Error);  // no schema_version
  CHECK_THROWS_AS(load_scene_text(R"({"schema_version": 99, "objects": []})"), Error);
  CHECK_THROWS_AS(load_scene_text(scene_with_objects(ball + "," + ball)), Error);  // duplicate
  // below the table
  CHECK_THROWS_AS(load_scene_text(scene_with_objects(
                      R"({"name": "sunk", "shape": [{"kind": "sphere", "radius": 0.05}],
                          "pose": {"position": [0, 0, 0.01]}})")),
                  Error);
  // tool flag without a region, and the reverse
  CHECK_THROWS_AS(load_scene_text(scene_with_objects(
                      R"({"name": "t", "is_tool": true,
                          "shape": [{"kind": "box", "size": [0.1, 0.02, 0.02]}],
                          "pose": {"position": [0, 0, 0.01]}})")),
                  Error);
  CHECK_THROWS_AS(load_scene_text(scene_with_objects(
                      R"({"name": "t", "shape": [{"kind": "box", "size": [0.1, 0.02, 0.02]}],
                          "grasp_region": {"center": [0, 0, 0], "size": [0.1, 0.02, 0.02]},
                          "pose": {"position": [0, 0, 0.01]}})")),
                  Error);
  // reserved and forbidden names
  CHECK_THROWS_AS(load_scene_text(scene_with_objects(
                      R"({"name": "none", "shape": [{"kind": "sphere", "radius": 0.02}],
                          "pose": {"position": [0, 0, 0.02]}})")),
                  Error);
  CHECK_THROWS_AS(load_scene_text(scene_with_objects(
                      R"({"name": "a'b", "shape": [{"kind": "sphere", "radius": 0.02}],
                          "pose": {"position": [0, 0, 0.02]}})")),
                  Error);
  // bad shapes
  CHECK_THROWS_AS(load_scene_text(scene_with_objects(
                      R"({"name": "z", "shape": [{"kind": "pyramid", "size": [1, 1, 1]}],
                          "pose": {"position": [0, 0, 0.5]}})")),
                  Error);
  CHECK_THROWS_AS(load_scene_text(scene_with_objects(
                      R"({"name": "z", "shape": [{"kind": "sphere", "radius": -0.1}],
                          "pose": {"position": [0, 0, 0.5]}})")),
                  Error);
  CHECK_THROWS_AS(load_scene_text(scene_with_objects(
                      R"({"name": "z", "shape": [], "pose": {"position": [0, 0, 0.5]}})")),
                  Error);
}

// ---- actions ------------------------------------------------------------

namespace {

WorldState kitchen() { return fixtures::scene_kitchen(); }

dsl::Action parse1(const std::string& line) { return dsl::parse_action(line); }

WorldState run_script(WorldState state, const std::vector<std::string>& lines,
                      std::vector<Event>* events = nullptr) {
  for (const auto& line : lines) {
    ApplyResult r = apply_action(state, parse1(line), {});
    state = std::move(r.state);
    if (events) events->insert(events->end(), r.events.begin(), r.events.end());
  }
  return state;
}

bool has_event(const std::vector<Event>& events, const std::string& kind,
               const std::string& key, const std::string& value) {
  for (const auto& e : events) {
    if (e.kind != kind) continue;
    auto it = e.detail.find(key);
    if (it != e.detail.end() && it->second == value) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("resolve_location reads original, current, and home") {
  WorldState state = kitchen();
  state.find("tomato")->pose.position = {0.10, 0.20, 0.02};
  CHECK(resolve_location(state, plan::LocationExpr::current_of("tomato"))
            .isApprox(Eigen::Vector3d(0.10, 0.20, 0.02), 1e-15));
  CHECK(resolve_location(state, plan::LocationExpr::original_of("tomato"))
            .isApprox(Eigen::Vector3d(0.38, -0.14, 0.02), 1e-15));
  CHECK(resolve_location(state, plan::LocationExpr::home())
            .isApprox(Eigen::Vector3d(0.40, 0.0, 0.35), 1e-15));
  CHECK_THROWS_AS(resolve_location(state, plan::LocationExpr::current_of("ghost")), Error);
}

TEST_CASE("goto moves the gripper and respects the table") {
  WorldState state = kitchen();
  state = run_script(state, {"Go-to: current position of tomato + (0, 0, 10) cm"});
  CHECK(state.robot.tcp.position.isApprox(Eigen::Vector3d(0.38, -0.14, 0.12), 1e-12));
  CHECK(state.revision == 1);
  CHECK_THROWS_AS(apply_action(state, parse1("Go-to: robot home pose + (0, 0, -36) cm"), {}),
                  Error);
  CHECK_THROWS_AS(apply_action(state, parse1("Go-to: robot home pose + (0, 0, 51) cm"), {}),
                  Error);
}

TEST_CASE("closing on empty space still closes the gripper") {
  WorldState state = kitchen();
  std::vector<Event> events;
  state = run_script(state, {"Grasp: 1"}, &events);  // home pose is 35 cm up
  CHECK_FALSE(state.robot.gripper_open);
  CHECK_FALSE(state.robot.held.has_value());
  CHECK(has_event(events, "grasp_close", "object", "none"));
  CHECK_THROWS_AS(apply_action(state, parse1("Grasp: 1"), {}), Error);
}

TEST_CASE("a grasp attaches the nearest reachable object and carries it") {
  WorldState state = kitchen();
  std::vector<Event> events;
  state = run_script(state,
                     {"Go-to: current position of tomato + (0, 0, 10) cm",
                      "Go-to: current position of tomato + (0, 0, 2) cm", "Grasp: 1"},
                     &events);
  REQUIRE(state.robot.held.has_value());
  CHECK(state.robot.held->object == "tomato");
  CHECK_FALSE(state.robot.held->in_grasp_region);
  CHECK(has_event(events, "grasp_close", "object", "tomato"));

  const Eigen::Vector3d before = state.find("tomato")->pose.position;
  state = run_script(state, {"Go-to: current position of tomato + (0, 0, 10) cm"});
  CHECK((state.find("tomato")->pose.position - before).isApprox(
      Eigen::Vector3d(0, 0, 0.08), 1e-12));
  // the target keeps the tcp above the table but would push the held tomato
  // (hanging 4 cm under it) through the surface
  CHECK_THROWS_AS(
      apply_action(state, parse1("Go-to: current position of tomato + (0, 0, -7) cm"), {}),
      Error);
}

TEST_CASE("release settles the load on the tallest support below") {
  WorldState state = kitchen();
  state = run_script(state, {"Go-to: current position of tomato + (0, 0, 2) cm", "Grasp: 1",
                             "Go-to: current position of tomato + (0, 0, 10) cm",
                             "Go-to: current position of plate + (0, 0, 12) cm"});
  std::vector<Event> events;
  state = run_script(state, {"Grasp: 0"}, &events);
  CHECK(state.robot.gripper_open);
  CHECK_FALSE(state.robot.held.has_value());
  CHECK(has_event(events, "settled", "support", "plate"));
  // plate is 1 cm tall; the 2 cm-radius tomato rests with its center at 3 cm
  CHECK(state.find("tomato")->pose.position.z() == doctest::Approx(0.03).epsilon(1e-9));
}

TEST_CASE("release over a container drops the load inside") {
  WorldState state = kitchen();
  state = run_script(state, {"Go-to: current position of tomato + (0, 0, 2) cm", "Grasp: 1",
                             "Go-to: current position of tomato + (0, 0, 10) cm",
                             "Go-to: current position of bowl + (0, 0, 8) cm"});
  std::vector<Event> events;
  state = run_script(state, {"Grasp: 0"}, &events);
  CHECK(has_event(events, "contained", "container", "bowl"));
  CHECK(state.effects_of("bowl").contains.count("tomato") == 1);
  CHECK(state.container_of("tomato") == std::string("bowl"));
  // floor clearance of 5 mm puts the 2 cm-radius tomato center at 2.5 cm
  CHECK(state.find("tomato")->pose.position.z() == doctest::Approx(0.025).epsilon(1e-9));
}

TEST_CASE("pieces wider than the jaw cannot be grasped") {
  WorldState state = fixtures::scene_place_board();  // board is 20 x 15 cm
  std::vector<Event> events;
  state = run_script(state,
                     {"Go-to: current position of table + (0, 0, 0.5) cm", "Grasp: 1"}, &events);
  CHECK_FALSE(state.robot.held.has_value());
  CHECK(has_event(events, "grasp_close", "object", "none"));
}

TEST_CASE("equidistant candidates break ties by name") {
  WorldState state;
  state.robot.home = default_home_pose();
  // coordinates chosen exactly representable so both distances are bit-equal
  state.robot.tcp.position = {0.5, 0.25, 0.3};
  SceneObject a, b;
  a.name = "pear";
  a.shape = {make_sphere(0.03)};
  a.pose.position = a.original_pose.position = {0.546875, 0.25, 0.3};
  b.name = "apple";
  b.shape = {make_sphere(0.03)};
  b.pose.position = b.original_pose.position = {0.453125, 0.25, 0.3};
  state.objects = {a, b};  // declaration order puts pear first
  std::vector<Event> events;
  state = run_script(state, {"Grasp: 1"}, &events);
  REQUIRE(state.robot.held.has_value());
  CHECK(state.robot.held->object == "apple");
}

TEST_CASE("grasping the handle sets in_grasp_region") {
  WorldState state = fixtures::scene_scoop_candy();
  std::vector<Event> events;
  state = run_script(state,
                     {"Go-to: current position of scoop + (3, 0, 12) cm",
                      "Go-to: current position of scoop + (3, 0, 0.8) cm", "Grasp: 1"},
                     &events);
  REQUIRE(state.robot.held.has_value());
  CHECK(state.robot.held->object == "scoop");
  CHECK(state.robot.held->in_grasp_region);
  CHECK(has_event(events, "grasp_close", "in_grasp_region", "true"));
}

TEST_CASE("scoop sweep, fill, and pour move granular material") {
  WorldState state = fixtures::scene_scoop_candy();
  std::vector<Event> events;
  // pick the scoop up by its handle
  state = run_script(state,
                     {"Go-to: current position of scoop + (3, 0, 12) cm",
                      "Go-to: current position of scoop + (3, 0, 0.8) cm", "Grasp: 1",
                      "Go-to: current position of scoop + (0, 0, 12) cm"});
  // sweep the head through the pile, lift, tip up
  state = run_script(state,
                     {"Go-to: current position of candies + (12, 0, 1.3) cm",
                      "Go-to: current position of candies + (3, 0, 1.3) cm",
                      "Go-to: current position of candies + (3, 0, 12) cm", "Tilt:(0, 35, 0)"},
                     &events);
  CHECK(has_event(events, "scoop_sweep", "material", "candies"));
  CHECK(has_event(events, "scoop_fill", "material", "candies"));
  CHECK(state.effects_of("scoop").contains.count("candies") == 1);
  // the load rides at the head centroid
  const SceneObject* scoop = state.find("scoop");
  const Eigen::Vector3d head = scoop->pose.transform() * head_centroid_local(*scoop);
  CHECK(state.find("candies")->pose.position.isApprox(head, 1e-9));

  // level out, move over the plate, tip down: the load pours out
  events.clear();
  state = run_script(state,
                     {"Tilt:(0, 0, 0)", "Go-to: current position of plate + (3.2, 0, 12) cm",
                      "Tilt:(0, -35, 0)"},
                     &events);
  CHECK(has_event(events, "pour", "material", "candies"));
  CHECK(state.effects_of("scoop").contains.empty());
  CHECK(has_event(events, "settled", "support", "plate"));

  // the poured pile rests on the plate
  const Aabb pile = object_aabb(*state.find("candies"));
  const Aabb plate = object_aabb(*state.find("plate"));
  CHECK(std::abs(pile.min.z() - plate.max.z()) < 1e-9);
}

TEST_CASE("verify_step rules for scoop and pour") {
  WorldState before = fixtures::scene_scoop_candy();
  WorldState after = before;
  const auto scoop_step =
      plan::parse_step("['scoop', 'current position of candies', 'candies', 'scoop']");
  CHECK(verify_step(before, after, scoop_step, {}).failed());
  after.effects_of("scoop").contains.insert("candies");
  CHECK(verify_step(before, after, scoop_step, {}).passed());

  const auto pour_step =
      plan::parse_step("['pour', 'current position of plate', 'candies', 'scoop']");
  CHECK(verify_step(before, after, pour_step, {}).failed());  // still in the scoop
  // resting on the plate counts
  WorldState poured = before;
  poured.find("candies")->pose.position = {0.36, 0.14, 0.017};  // plate top + half height
  CHECK(verify_step(before, poured, pour_step, {}).passed());
  const auto pour_home = plan::parse_step("['pour', 'robot home pose', 'candies', 'scoop']");
  CHECK(verify_step(before, poured, pour_home, {}).status == VerifyStatus::Unverifiable);
}

TEST_CASE("flattening presses dough into a wider disc") {
  WorldState state = fixtures::scene_flatten();
  std::vector<Event> events;
  state = run_script(state,
                     {"Go-to: current position of flattener + (0, 0, 12) cm",
                      "Go-to: current position of flattener + (0, 0, 3) cm", "Grasp: 1",
                      "Go-to: current position of flattener + (0, 0, 12) cm",
                      "Go-to: current position of dough + (0, 0, 12) cm",
                      "Go-to: current position of dough + (0, 0, 4) cm",
                      "Go-to: current position of dough + (0, 0, 12) cm"},
                     &events);
  CHECK(has_event(events, "flatten", "object", "dough"));
  CHECK(state.effects_of("dough").flattened);
  const SceneObject* dough = state.find("dough");
  REQUIRE(dough->shape.size() == 1);
  CHECK(dough->shape[0].kind == ShapeKind::Cylinder);
  // half as tall, sqrt(2) wider than the original 2.5 cm ball
  CHECK(dough->shape[0].height() == doctest::Approx(0.025));
  CHECK(dough->shape[0].radius() == doctest::Approx(0.025 * std::sqrt(2.0)));
  CHECK(object_aabb(*dough).min.z() == doctest::Approx(0.0).epsilon(1e-9));

  const auto step = plan::parse_step("['flatten', 'current position of dough', 'dough', 'flattener']");
  CHECK(verify_step(fixtures::scene_flatten(), state, step, {}).passed());
  // a second press brings the head back into the contact window but the
  // sheet is already flat, so nothing happens
  events.clear();
  state = run_script(state,
                     {"Go-to: current position of dough + (0, 0, 5) cm",
                      "Go-to: current position of dough + (0, 0, 12) cm"},
                     &events);
  CHECK_FALSE(has_event(events, "flatten", "object", "dough"));
}

TEST_CASE("poking a flattened sheet counts holes") {
  // start from a hand-flattened sheet with the poker already in the gripper
  WorldState state = fixtures::scene_flatten_poke();
  std::vector<Event> events;
  state = run_script(state,
                     {"Go-to: current position of flattener + (0, 0, 12) cm",
                      "Go-to: current position of flattener + (0, 0, 3) cm", "Grasp: 1",
                      "Go-to: current position of flattener + (0, 0, 12) cm",
                      "Go-to: current position of dough + (0, 0, 12) cm",
                      "Go-to: current position of dough + (0, 0, 4) cm",
                      "Go-to: original position of flattener + (0, 0, 12) cm",
                      "Go-to: original position of flattener + (0, 0, 4.5) cm", "Grasp: 0",
                      "Go-to: current position of poker + (0, 0, 12) cm",
                      "Go-to: current position of poker + (0, 0, 4) cm", "Grasp: 1",
                      "Go-to: current position of poker + (0, 0, 12) cm",
                      "Go-to: current position of dough + (0, 0, 10) cm",
                      "Go-to: current position of dough + (0, 0, 7.9) cm",
                      "Go-to: current position of dough + (0, 0, 10) cm",
                      "Go-to: current position of dough + (0, 0, 7.9) cm"},
                     &events);
  CHECK(state.effects_of("dough").holes_poked == 2);
  CHECK(has_event(events, "poke", "holes", "2"));
  const auto step = plan::parse_step("['poke', 'current position of dough', 'dough', 'poker']");
  CHECK(verify_step(fixtures::scene_flatten_poke(), state, step, {}).passed());
}

TEST_CASE("whisking needs three stroke reversals inside the bowl") {
  WorldState state = fixtures::scene_whisk();
  std::vector<Event> events;
  // the descent into the bowl is not a stroke (it starts outside), so four
  // in-bowl moves give two direction reversals
  state = run_script(state,
                     {"Go-to: current position of whisk + (3, 0, 12) cm",
                      "Go-to: current position of whisk + (3, 0, 0.8) cm", "Grasp: 1",
                      "Go-to: current position of whisk + (0, 0, 12) cm",
                      "Go-to: current position of bowl + (4.7, 1.5, 2.55) cm",
                      "Go-to: current position of bowl + (4.7, -1.5, 2.55) cm",
                      "Go-to: current position of bowl + (4.7, 1.5, 2.55) cm",
                      "Go-to: current position of bowl + (4.7, -1.5, 2.55) cm"},
                     &events);
  CHECK_FALSE(state.effects_of("bowl").whisked);
  CHECK(state.trackers.reversals.at("whisk").at("bowl") == 2);
  state = run_script(state, {"Go-to: current position of bowl + (4.7, 1.5, 2.55) cm"}, &events);
  CHECK(state.effects_of("bowl").whisked);
  CHECK(has_event(events, "whisk", "container", "bowl"));
  const auto step = plan::parse_step("['whisk', 'current position of bowl', 'bowl', 'whisk']");
  CHECK(verify_step(fixtures::scene_whisk(), state, step, {}).passed());
}

TEST_CASE("verify_step for pickup and place") {
  WorldState before = kitchen();
  WorldState after = run_script(before, {"Go-to: current position of tomato + (0, 0, 2) cm",
                                         "Grasp: 1",
                                         "Go-to: current position of tomato + (0, 0, 10) cm"});
  const auto pickup = plan::parse_step(
      "['pickup', 'current position of tomato', 'tomato', 'none']");
  CHECK(verify_step(before, after, pickup, {}).passed());
  CHECK(verify_step(before, before, pickup, {}).failed());  // nothing held

  // put it down next to the bowl
  WorldState placed = run_script(after, {"Go-to: current position of bowl + (7.5, 0, 8) cm",
                                         "Grasp: 0"});
  const auto place = plan::parse_step("['place', 'current position of bowl', 'tomato', 'none']");
  CHECK(verify_step(after, placed, place, {}).passed());
  // too far away fails with a distance in the reason
  WorldState far = run_script(after, {"Go-to: current position of bowl + (30, 0, 8) cm",
                                      "Grasp: 0"});
  const auto verdict = verify_step(after, far, place, {});
  CHECK(verdict.failed());
  CHECK(verdict.reason.find("tomato") != std::string::npos);
  // still in the gripper also fails
  CHECK(verify_step(before, after, place, {}).failed());
}

TEST_CASE("verify_step insert rule needs containment") {
  WorldState before = kitchen();
  const auto insert = plan::parse_step("['insert', 'current position of bowl', 'tomato', 'none']");
  WorldState inside = run_script(before, {"Go-to: current position of tomato + (0, 0, 2) cm",
                                          "Grasp: 1",
                                          "Go-to: current position of tomato + (0, 0, 10) cm",
                                          "Go-to: current position of bowl + (0, 0, 8) cm",
                                          "Grasp: 0"});
  CHECK(verify_step(before, inside, insert, {}).passed());
  // resting next to the bowl is not inside it
  WorldState beside = run_script(before, {"Go-to: current position of tomato + (0, 0, 2) cm",
                                          "Grasp: 1",
                                          "Go-to: current position of tomato + (0, 0, 10) cm",
                                          "Go-to: current position of bowl + (7.5, 0, 8) cm",
                                          "Grasp: 0"});
  CHECK(verify_step(before, beside, insert, {}).failed());
  const auto insert_home = plan::parse_step("['insert', 'robot home pose', 'tomato', 'none']");
  CHECK(verify_step(before, inside, insert_home, {}).status == VerifyStatus::Unverifiable);
}

TEST_CASE("unknown verbs are unverifiable, not failures") {
  const WorldState w = kitchen();
  const auto step = plan::parse_step("['wave', 'robot home pose', 'none', 'none']");
  const auto verdict = verify_step(w, w, step, {});
  CHECK(verdict.status == VerifyStatus::Unverifiable);
  CHECK(verdict.reason.find("wave") != std::string::npos);
}

TEST_CASE("releasing a tool clears its motion bookkeeping") {
  WorldState state = fixtures::scene_scoop_candy();
  state = run_script(state, {"Go-to: current position of scoop + (3, 0, 12) cm",
                             "Go-to: current position of scoop + (3, 0, 0.8) cm", "Grasp: 1",
                             "Go-to: current position of scoop + (0, 0, 12) cm",
                             "Go-to: current position of candies + (12, 0, 1.3) cm",
                             "Go-to: current position of candies + (3, 0, 1.3) cm"});
  CHECK(state.trackers.pending_scoop.count("scoop") == 1);
  state = run_script(state, {"Go-to: current position of candies + (3, 0, 12) cm", "Grasp: 0"});
  CHECK(state.trackers.pending_scoop.count("scoop") == 0);
}

TEST_CASE("apply_sequence is apply_action folded over the list") {
  WorldState state = kitchen();
  const auto actions = dsl::parse_sequence(
      "Go-to: current position of tomato + (0, 0, 2) cm\n"
      "Grasp: 1\n"
      "Go-to: current position of tomato + (0, 0, 10) cm\n");
  const ApplyResult got = apply_sequence(state, actions, {});
  WorldState manual = state;
  std::vector<Event> manual_events;
  for (const auto& a : actions) {
    ApplyResult r = apply_action(manual, a, {});
    manual = std::move(r.state);
    manual_events.insert(manual_events.end(), r.events.begin(), r.events.end());
  }
  CHECK(serialize_world(got.state) == serialize_world(manual));
  CHECK(got.events.size() == manual_events.size());
}
