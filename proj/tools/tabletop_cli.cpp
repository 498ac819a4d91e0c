// Command line front end: run single tasks, sweep the benchmark suite,
// compare grasp-region ablations, inspect saved traces, and regenerate the
// on-disk assets (prompts, scenes, rig, tool database).

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tabletop/agents/agents.hpp"
#include "tabletop/common/errors.hpp"
#include "tabletop/fixtures/fixtures.hpp"
#include "tabletop/grasp/tog.hpp"
#include "tabletop/harness/scripted.hpp"
#include "tabletop/harness/suite.hpp"
#include "tabletop/perception/pipeline.hpp"
#include "tabletop/run/orchestrator.hpp"
#include "tabletop/world/scene_io.hpp"

namespace fs = std::filesystem;
using namespace tabletop;

namespace {

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string backend = "scripted";
  std::string endpoint = "http://127.0.0.1:8089/v1/chat/completions";
  std::string model = "default";
  double timeout_seconds = 30.0;
  int attempts = 3;
  double noise_sigma = 0.0;
  double confusion_rate = 0.0;
  double miss_rate = 0.0;
  bool no_affordance = false;
  std::string tooldb_dir;
  std::string prompts_dir;
  std::string rig_file;
};

void add_common_flags(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--seed", opts.seed, "Base random seed");
  cmd->add_option("--backend", opts.backend, "Agent backend")
      ->check(CLI::IsMember({"scripted", "remote"}))
      ->capture_default_str();
  cmd->add_option("--endpoint", opts.endpoint, "Chat completion endpoint (remote backend)")
      ->capture_default_str();
  cmd->add_option("--model", opts.model, "Model name sent to the endpoint")
      ->capture_default_str();
  cmd->add_option("--timeout", opts.timeout_seconds, "Per-request timeout in seconds")
      ->capture_default_str();
  cmd->add_option("--attempts", opts.attempts, "Total tries per request")
      ->capture_default_str();
  cmd->add_option("--noise-sigma", opts.noise_sigma, "Depth noise sigma in meters");
  cmd->add_option("--confusion-rate", opts.confusion_rate,
                  "Detector chance of landing on the paired label");
  cmd->add_option("--miss-rate", opts.miss_rate, "Detector chance of missing a visible object");
  cmd->add_flag("--no-affordance", opts.no_affordance,
                "Grasp tools at the silhouette centroid instead of the stored region");
  cmd->add_option("--tooldb", opts.tooldb_dir,
                  "Tool database directory (default: built in-process from the catalog)");
  cmd->add_option("--prompts-dir", opts.prompts_dir,
                  "Directory with <role>.txt prompt templates (default: built-in)");
  cmd->add_option("--rig", opts.rig_file, "Camera rig JSON (default: the standard four-camera rig)");
}

run::RunConfig make_run_config(const CommonOpts& opts) {
  run::RunConfig rc;
  rc.perception =
      opts.rig_file.empty() ? fixtures::default_rig() : perception::load_rig_file(opts.rig_file);
  rc.perception.noise.depth_sigma = opts.noise_sigma;
  rc.perception.detector.confusion_rate = opts.confusion_rate;
  rc.perception.detector.miss_rate = opts.miss_rate;
  rc.grasp.noise.depth_sigma = opts.noise_sigma;
  rc.seed = opts.seed;
  rc.no_affordance = opts.no_affordance;
  return rc;
}

grasp::ToolDatabase make_tool_db(const CommonOpts& opts) {
  if (!opts.tooldb_dir.empty()) return grasp::load_tool_db(opts.tooldb_dir);
  return grasp::build_tool_db(fixtures::db_tool_catalog());
}

agents::PromptLibrary make_prompts(const CommonOpts& opts) {
  if (!opts.prompts_dir.empty()) return agents::PromptLibrary::load_dir(opts.prompts_dir);
  return agents::PromptLibrary::builtin();
}

std::shared_ptr<agents::CompletionBackend> make_backend(const CommonOpts& opts) {
  if (opts.backend == "remote") {
    agents::RemoteBackendConfig cfg;
    cfg.endpoint = opts.endpoint;
    cfg.model = opts.model;
    cfg.timeout_seconds = opts.timeout_seconds;
    cfg.max_attempts = opts.attempts;
    return std::make_shared<agents::RemoteBackend>(cfg);
  }
  return harness::make_scripted_backend(harness::default_experiments());
}

const harness::Experiment* find_experiment(const std::vector<harness::Experiment>& experiments,
                                           const std::string& task) {
  for (const auto& exp : experiments)
    if (exp.name == task || exp.query == task) return &exp;
  return nullptr;
}

void write_file_or_die(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  world::save_text_file(path, text);
}

void dump_clouds(const run::ExecutionTrace& trace, const world::WorldState& initial,
                 const run::RunConfig& rc, const fs::path& dir) {
  fs::create_directories(dir);
  perception::Pipeline pipeline(rc.perception);
  Rng rng(derive_seed(rc.seed, "cloud-dump"));
  for (const auto& g : trace.groundings) {
    if (!g.found) continue;
    try {
      const auto fused = pipeline.query_object(initial, g.name, rng);
      perception::write_cloud(fused.points, dir / (g.name + ".xyz"));
      std::cout << "wrote " << (dir / (g.name + ".xyz")).string() << " (" << fused.points.size()
                << " points)\n";
    } catch (const Error& e) {
      std::cerr << "cloud dump for '" << g.name << "' failed: " << e.what() << "\n";
    }
  }
}

void dump_heatmaps(const run::ExecutionTrace& trace, const world::WorldState& initial,
                   const run::RunConfig& rc, const grasp::ToolDatabase& db, const fs::path& dir) {
  fs::create_directories(dir);
  Rng rng(derive_seed(rc.seed, "heatmap-dump"));
  for (const auto& g : trace.groundings) {
    if (!g.found) continue;
    std::optional<std::string> model;
    if (db.find(g.name)) model = g.name;
    try {
      Rng fork = rng.fork(g.name);
      const auto plan = grasp::plan_grasp(initial, g.centroid, model, db, rc.grasp, fork);
      write_pgm_scaled(plan.heatmap, dir / (g.name + "-heatmap.pgm"));
      write_pgm(plan.query_mask, dir / (g.name + "-mask.pgm"));
      if (plan.region_mask.width() > 0)
        write_pgm(plan.region_mask, dir / (g.name + "-region.pgm"));
      std::cout << "wrote grasp maps for '" << g.name << "'\n";
    } catch (const Error& e) {
      std::cerr << "heatmap dump for '" << g.name << "' failed: " << e.what() << "\n";
    }
  }
}

void print_trace_summary(const run::ExecutionTrace& trace) {
  std::cout << "task:    " << trace.query << "\n";
  std::cout << "backend: " << trace.backend << "  seed: " << trace.seed << "\n";
  std::cout << "status:  " << trace.status;
  if (!trace.failure_stage.empty())
    std::cout << " (" << trace.failure_stage << ": " << trace.failure_reason << ")";
  std::cout << "\n";
  if (!trace.comprehension.empty()) {
    std::cout << "relevant objects:\n";
    for (const auto& e : trace.comprehension)
      std::cout << "  " << e.name << (e.is_tool ? " (tool)" : "") << "\n";
  }
  if (!trace.plan.empty()) {
    std::cout << "plan:\n";
    for (const auto& s : trace.plan) std::cout << "  " << s << "\n";
  }
  for (const auto& g : trace.groundings) {
    std::cout << "grounding " << g.name << ": ";
    if (g.found) {
      std::cout << "(" << g.centroid.x() << ", " << g.centroid.y() << ", " << g.centroid.z()
                << ") from " << g.view_count << " views\n";
    } else {
      std::cout << "not found (" << g.error << ")\n";
    }
  }
  for (const auto& s : trace.steps) {
    std::cout << "step " << s.step << " -> " << s.verify;
    if (!s.verify_reason.empty()) std::cout << " (" << s.verify_reason << ")";
    std::cout << "\n";
    if (s.grasp) {
      const auto& gr = *s.grasp;
      std::cout << "  grasp " << gr.object << (gr.used_fallback ? " [fallback]" : "")
                << (gr.db_model ? " model=" + *gr.db_model : std::string());
      std::cout << " width=" << gr.width_m << " yaw=" << gr.yaw_deg << "\n";
    }
  }
}

int cmd_run(const CommonOpts& opts, const std::string& task, const std::string& scene_file,
            const std::string& out, const std::string& clouds_dir,
            const std::string& heatmaps_dir) {
  const auto experiments = harness::default_experiments();
  const harness::Experiment* exp = find_experiment(experiments, task);
  if (!exp && scene_file.empty()) {
    std::cerr << "error: '" << task << "' is not a benchmark task, so --scene is required\n";
    return 2;
  }
  world::WorldState scene;
  if (!scene_file.empty()) {
    scene = world::load_scene_file(scene_file);
  } else {
    scene = exp->make_scene(opts.seed);
  }
  const std::string query = exp ? exp->query : task;

  auto backend = make_backend(opts);
  agents::AgentSuite suite(backend, make_prompts(opts));
  const auto db = make_tool_db(opts);
  const auto rc = make_run_config(opts);

  const auto trace = run::run_task(query, scene, rc, suite, db);
  print_trace_summary(trace);
  if (exp) {
    const auto gates = harness::evaluate_gates(*exp, trace);
    std::cout << "gates: comprehension=" << (gates.comprehension ? "pass" : "fail")
              << " grounding=" << (gates.grounding ? "pass" : "fail")
              << " milestone=" << (gates.milestone ? "pass" : "fail")
              << " full=" << (gates.full ? "pass" : "fail") << "  score=" << gates.score() << "\n";
  }
  if (!out.empty()) {
    run::save_trace(trace, out);
    std::cout << "trace written to " << out << "\n";
  }
  if (!clouds_dir.empty()) dump_clouds(trace, scene, rc, clouds_dir);
  if (!heatmaps_dir.empty()) dump_heatmaps(trace, scene, rc, db, heatmaps_dir);
  return trace.completed() ? 0 : 1;
}

int cmd_suite(const CommonOpts& opts, int trials, const std::vector<std::string>& only,
              const std::string& out, const std::string& csv, const std::string& traces_dir) {
  const auto experiments = harness::default_experiments();
  harness::SuiteConfig cfg;
  cfg.run = make_run_config(opts);
  cfg.trials = trials;
  cfg.only = only;

  const auto result =
      harness::run_suite(experiments, cfg, make_backend(opts), make_tool_db(opts));
  const std::string md = harness::render_markdown(result);
  std::cout << md;
  if (!out.empty()) write_file_or_die(out, md);
  if (!csv.empty()) write_file_or_die(csv, harness::render_csv(result));
  if (!traces_dir.empty()) {
    fs::create_directories(traces_dir);
    for (const auto& trial : result.trials) {
      const auto path =
          fs::path(traces_dir) / (trial.experiment + "-" + std::to_string(trial.trial) + ".json");
      run::save_trace(trial.trace, path);
    }
    std::cout << result.trials.size() << " traces written to " << traces_dir << "\n";
  }

  for (const auto& report : result.reports)
    if (report.full < report.trials) return 1;
  return 0;
}

int cmd_ablate(const CommonOpts& opts, int trials, const std::vector<std::string>& only,
               const std::string& out) {
  const auto experiments = harness::default_experiments();
  harness::SuiteConfig cfg;
  cfg.run = make_run_config(opts);
  cfg.trials = trials;
  cfg.only = only;

  const auto result =
      harness::run_ablation(experiments, cfg, make_backend(opts), make_tool_db(opts));
  const std::string md = harness::render_ablation_markdown(result);
  std::cout << md;
  if (!out.empty()) write_file_or_die(out, md);
  return 0;
}

int cmd_report(const std::vector<std::string>& files) {
  const auto experiments = harness::default_experiments();
  bool first = true;
  for (const auto& file : files) {
    if (!first) std::cout << "\n";
    first = false;
    const auto trace = run::load_trace(file);
    std::cout << "== " << file << " ==\n";
    print_trace_summary(trace);
    if (const auto* exp = find_experiment(experiments, trace.query)) {
      const auto gates = harness::evaluate_gates(*exp, trace);
      std::cout << "score: " << gates.score() << "\n";
    }
  }
  return 0;
}

int cmd_assets(const std::string& out_dir) {
  const fs::path root(out_dir);

  const fs::path prompt_dir = root / "prompts";
  fs::create_directories(prompt_dir);
  const auto prompts = agents::PromptLibrary::builtin();
  for (agents::Role role :
       {agents::Role::SceneComprehension, agents::Role::OverallPlanner, agents::Role::StepPlanner,
        agents::Role::ToolMapper}) {
    const auto path = prompt_dir / (std::string(agents::role_name(role)) + ".txt");
    world::save_text_file(path, prompts.text(role));
  }
  std::cout << "prompts -> " << prompt_dir.string() << "\n";

  const fs::path scene_dir = root / "scenes";
  fs::create_directories(scene_dir);
  const std::vector<std::pair<std::string, world::WorldState>> scenes = {
      {"kitchen", fixtures::scene_kitchen()},
      {"scoop-candy", fixtures::scene_scoop_candy()},
      {"flatten", fixtures::scene_flatten()},
      {"whisk", fixtures::scene_whisk()},
      {"scoop-to-bowl", fixtures::scene_scoop_to_bowl()},
      {"flatten-poke", fixtures::scene_flatten_poke()},
      {"scoop-to-dough", fixtures::scene_scoop_to_dough()},
      {"place-board", fixtures::scene_place_board()},
  };
  for (const auto& [name, scene] : scenes)
    world::save_text_file(scene_dir / (name + ".json"), world::serialize_scene(scene));
  std::cout << "scenes -> " << scene_dir.string() << "\n";

  world::save_text_file(root / "rig.json", perception::serialize_rig(fixtures::default_rig()));
  std::cout << "rig -> " << (root / "rig.json").string() << "\n";

  const auto db = grasp::build_tool_db(fixtures::db_tool_catalog());
  grasp::save_tool_db(db, root / "tooldb");
  std::cout << "tool db (" << db.size() << " models) -> " << (root / "tooldb").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabletop manipulation pipeline: language-planned, vision-grounded tool use"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* run_cmd = app.add_subcommand("run", "Run one task end to end");
  std::string task, scene_file, trace_out, clouds_dir, heatmaps_dir;
  run_cmd->add_option("--task", task, "Benchmark task name, or a free-form task sentence")
      ->required();
  run_cmd->add_option("--scene", scene_file, "Scene JSON (default: the task's benchmark scene)");
  run_cmd->add_option("--out", trace_out, "Write the execution trace JSON here");
  run_cmd->add_option("--dump-clouds", clouds_dir, "Dump fused point clouds (x y z) to this directory");
  run_cmd->add_option("--dump-heatmaps", heatmaps_dir,
                      "Dump grasp heatmaps and masks (PGM) to this directory");
  add_common_flags(run_cmd, opts);

  auto* suite_cmd = app.add_subcommand("suite", "Run the benchmark suite and report gate rates");
  int trials = 10;
  std::vector<std::string> only;
  std::string suite_out, suite_csv, traces_dir;
  suite_cmd->add_option("--trials", trials, "Trials per task")->capture_default_str();
  suite_cmd->add_option("--only", only, "Restrict to these task names");
  suite_cmd->add_option("--out", suite_out, "Write the markdown report here");
  suite_cmd->add_option("--csv", suite_csv, "Write the per-trial CSV here");
  suite_cmd->add_option("--traces", traces_dir, "Write every trial's trace JSON to this directory");
  add_common_flags(suite_cmd, opts);

  auto* ablate_cmd =
      app.add_subcommand("ablate", "Run the suite with and without grasp-region transfer");
  int ablate_trials = 10;
  std::vector<std::string> ablate_only;
  std::string ablate_out;
  ablate_cmd->add_option("--trials", ablate_trials, "Trials per task")->capture_default_str();
  ablate_cmd->add_option("--only", ablate_only, "Restrict to these task names");
  ablate_cmd->add_option("--out", ablate_out, "Write the markdown comparison here");
  add_common_flags(ablate_cmd, opts);

  auto* report_cmd = app.add_subcommand("report", "Summarize saved execution traces");
  std::vector<std::string> trace_files;
  report_cmd->add_option("traces", trace_files, "Trace JSON files")->required();

  auto* assets_cmd =
      app.add_subcommand("assets", "Regenerate prompts, scenes, rig, and the tool database");
  std::string assets_out = "assets";
  assets_cmd->add_option("--out", assets_out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed())
      return cmd_run(opts, task, scene_file, trace_out, clouds_dir, heatmaps_dir);
    if (suite_cmd->parsed())
      return cmd_suite(opts, trials, only, suite_out, suite_csv, traces_dir);
    if (ablate_cmd->parsed()) return cmd_ablate(opts, ablate_trials, ablate_only, ablate_out);
    if (report_cmd->parsed()) return cmd_report(trace_files);
    if (assets_cmd->parsed()) return cmd_assets(assets_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
