#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tabletop/grasp/tooldb.hpp"
#include "tabletop/harness/experiments.hpp"
#include "tabletop/run/orchestrator.hpp"

namespace tabletop::harness {

struct SuiteConfig {
  run::RunConfig run;  // template; each trial derives its own seed from run.seed
  int trials = 10;
  std::vector<std::string> only;  // experiment-name filter, empty keeps everything
};

struct TrialResult {
  std::string experiment;
  int trial = 0;
  std::uint64_t seed = 0;
  GateLadder gates;
  int score = 0;
  run::ExecutionTrace trace;
};

struct ExperimentReport {
  std::string experiment;
  TaskCategory category = TaskCategory::PickPlace;
  std::string query;
  int trials = 0;
  // Trials clearing each rung of the ladder.
  int comprehension = 0;
  int grounding = 0;
  int milestone = 0;
  int full = 0;
  double mean_score = 0.0;
};

struct SuiteResult {
  std::vector<TrialResult> trials;
  std::vector<ExperimentReport> reports;
};

std::uint64_t trial_seed(std::uint64_t base, const std::string& experiment, int trial);

// Runs every selected experiment for the configured number of trials, each
// on its own jittered scene. A trial that dies early still produces a scored
// trace; nothing stops the sweep. Equal configurations give byte-identical
// traces and reports.
SuiteResult run_suite(const std::vector<Experiment>& experiments, const SuiteConfig& cfg,
                      std::shared_ptr<agents::CompletionBackend> backend,
                      const grasp::ToolDatabase& db);

std::string render_markdown(const SuiteResult& result);
std::string render_csv(const SuiteResult& result);

// The same sweep twice, with the stored grasp regions and with centroid
// grasping, to show what the region transfer buys.
struct AblationRow {
  std::string experiment;
  int trials = 0;
  int milestone_with = 0;
  int full_with = 0;
  int milestone_without = 0;
  int full_without = 0;
};

struct AblationResult {
  std::vector<AblationRow> rows;
  SuiteResult with_regions;
  SuiteResult without_regions;
};

AblationResult run_ablation(const std::vector<Experiment>& experiments, const SuiteConfig& cfg,
                            std::shared_ptr<agents::CompletionBackend> backend,
                            const grasp::ToolDatabase& db);

std::string render_ablation_markdown(const AblationResult& result);

}  // namespace tabletop::harness
