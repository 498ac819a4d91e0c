#include <benchmark/benchmark.h>

#include "tabletop/common/edt.hpp"
#include "tabletop/dsl/actions.hpp"
#include "tabletop/fixtures/fixtures.hpp"
#include "tabletop/grasp/candidates.hpp"
#include "tabletop/grasp/tooldb.hpp"
#include "tabletop/perception/cloud.hpp"
#include "tabletop/perception/pipeline.hpp"
#include "tabletop/perception/render.hpp"
#include "tabletop/plan/schema.hpp"
#include "tabletop/world/actions.hpp"

using namespace tabletop;

namespace {

void BM_RenderRig(benchmark::State& state) {
  const auto scene = fixtures::scene_kitchen();
  const auto rig = fixtures::default_rig();
  Rng rng(7);
  for (auto _ : state) {
    auto views = perception::render_views(scene, rig.cameras, rig.noise, rng);
    benchmark::DoNotOptimize(views);
  }
}
BENCHMARK(BM_RenderRig)->Unit(benchmark::kMillisecond);

void BM_QueryObject(benchmark::State& state) {
  const auto scene = fixtures::scene_kitchen();
  perception::Pipeline pipeline(fixtures::default_rig());
  Rng rng(7);
  pipeline.views(scene, rng);  // render once up front; the loop measures detect+fuse+denoise
  for (auto _ : state) {
    auto fused = pipeline.query_object(scene, "tomato", rng);
    benchmark::DoNotOptimize(fused);
  }
}
BENCHMARK(BM_QueryObject)->Unit(benchmark::kMillisecond);

void BM_DenoiseCloud(benchmark::State& state) {
  Rng rng(11);
  std::vector<Eigen::Vector3d> points;
  points.reserve(4000);
  for (int i = 0; i < 4000; ++i)
    points.emplace_back(rng.normal(0, 0.02), rng.normal(0, 0.02), rng.normal(0.05, 0.02));
  for (auto _ : state) {
    auto result = perception::denoise_cloud(points, {});
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_DenoiseCloud)->Unit(benchmark::kMillisecond);

void BM_DistanceTransform(benchmark::State& state) {
  const auto model = grasp::capture_tool_model(fixtures::make_scoop("scoop", 0, 0), 240, 0.30, 60.0);
  for (auto _ : state) {
    auto field = squared_distance_transform(model.full_mask);
    benchmark::DoNotOptimize(field);
  }
}
BENCHMARK(BM_DistanceTransform);

void BM_GenerateGrasps(benchmark::State& state) {
  const auto model = grasp::capture_tool_model(fixtures::make_scoop("scoop", 0, 0), 240, 0.30, 60.0);
  for (auto _ : state) {
    auto grasps = grasp::generate_grasps(model.full_mask, model.meters_per_pixel);
    benchmark::DoNotOptimize(grasps);
  }
}
BENCHMARK(BM_GenerateGrasps)->Unit(benchmark::kMillisecond);

void BM_ParsePlan(benchmark::State& state) {
  const std::string text =
      "[['pick up', 'home position', 'scoop', 'none'], "
      "['scoop', 'current position of candies', 'candies', 'scoop'], "
      "['place', 'original position of scoop', 'scoop', 'none']]";
  for (auto _ : state) {
    auto steps = plan::parse_plan(text);
    benchmark::DoNotOptimize(steps);
  }
}
BENCHMARK(BM_ParsePlan);

void BM_ParseActions(benchmark::State& state) {
  const std::string text =
      "Go-to: current position of bowl + (3, 0, 10) cm\n"
      "Go-to: current position of bowl + (3, 0, 1.5) cm\n"
      "Grasp: 1\n"
      "Tilt:(0, 35, 0)\n";
  for (auto _ : state) {
    auto actions = dsl::parse_sequence(text);
    benchmark::DoNotOptimize(actions);
  }
}
BENCHMARK(BM_ParseActions);

void BM_ApplyGoTo(benchmark::State& state) {
  const auto scene = fixtures::scene_kitchen();
  const auto action = dsl::parse_action("Go-to: current position of tomato + (0, 0, 10) cm");
  for (auto _ : state) {
    auto result = world::apply_action(scene, action);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_ApplyGoTo);

}  // namespace

BENCHMARK_MAIN();
