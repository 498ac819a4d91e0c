#include "tabletop/harness/suite.hpp"

#include <algorithm>

#include "tabletop/common/rng.hpp"
#include "tabletop/common/strings.hpp"

namespace tabletop::harness {

namespace {

bool selected(const SuiteConfig& cfg, const Experiment& exp) {
  if (cfg.only.empty()) return true;
  return std::find(cfg.only.begin(), cfg.only.end(), exp.name) != cfg.only.end();
}

std::string ratio(int passed, int total) {
  return std::to_string(passed) + "/" + std::to_string(total);
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base, const std::string& experiment, int trial) {
  return derive_seed(base, experiment + "-" + std::to_string(trial));
}

SuiteResult run_suite(const std::vector<Experiment>& experiments, const SuiteConfig& cfg,
                      std::shared_ptr<agents::CompletionBackend> backend,
                      const grasp::ToolDatabase& db) {
  SuiteResult result;
  for (const auto& exp : experiments) {
    if (!selected(cfg, exp)) continue;

    ExperimentReport report;
    report.experiment = exp.name;
    report.category = exp.category;
    report.query = exp.query;

    for (int trial = 0; trial < cfg.trials; ++trial) {
      TrialResult tr;
      tr.experiment = exp.name;
      tr.trial = trial;
      tr.seed = trial_seed(cfg.run.seed, exp.name, trial);

      run::RunConfig rc = cfg.run;
      rc.seed = tr.seed;
      try {
        const world::WorldState scene = exp.make_scene(tr.seed);
        agents::AgentSuite agents(backend, agents::PromptLibrary::builtin());
        tr.trace = run::run_task(exp.query, scene, rc, agents, db);
      } catch (const std::exception& e) {
        // run_task contains its own failures; anything reaching here is a
        // harness-level defect, scored zero rather than stopping the sweep.
        tr.trace.query = exp.query;
        tr.trace.seed = tr.seed;
        tr.trace.status = "error";
        tr.trace.failure_stage = "harness";
        tr.trace.failure_reason = e.what();
      }

      tr.gates = evaluate_gates(exp, tr.trace);
      tr.score = tr.gates.score();

      report.trials += 1;
      report.comprehension += tr.gates.comprehension ? 1 : 0;
      report.grounding += tr.gates.grounding ? 1 : 0;
      report.milestone += tr.gates.milestone ? 1 : 0;
      report.full += tr.gates.full ? 1 : 0;
      report.mean_score += tr.score;

      result.trials.push_back(std::move(tr));
    }
    if (report.trials > 0) report.mean_score /= report.trials;
    result.reports.push_back(std::move(report));
  }
  return result;
}

std::string render_markdown(const SuiteResult& result) {
  std::string out;
  out += "| task | category | trials | 25% | 50% | 75% | 100% | mean |\n";
  out += "| --- | --- | --- | --- | --- | --- | --- | --- |\n";
  for (const auto& r : result.reports) {
    out += "| " + r.experiment + " | " + std::string(category_label(r.category)) + " | " +
           std::to_string(r.trials) + " | " + ratio(r.comprehension, r.trials) + " | " +
           ratio(r.grounding, r.trials) + " | " + ratio(r.milestone, r.trials) + " | " +
           ratio(r.full, r.trials) + " | " + format_double(r.mean_score) + " |\n";
  }
  return out;
}

std::string render_csv(const SuiteResult& result) {
  std::string out = "experiment,category,query,trials,pass25,pass50,pass75,pass100,mean_score\n";
  for (const auto& r : result.reports) {
    out += csv_field(r.experiment) + "," + std::string(category_label(r.category)) + "," +
           csv_field(r.query) + "," + std::to_string(r.trials) + "," +
           std::to_string(r.comprehension) + "," + std::to_string(r.grounding) + "," +
           std::to_string(r.milestone) + "," + std::to_string(r.full) + "," +
           format_double(r.mean_score) + "\n";
  }
  return out;
}

AblationResult run_ablation(const std::vector<Experiment>& experiments, const SuiteConfig& cfg,
                            std::shared_ptr<agents::CompletionBackend> backend,
                            const grasp::ToolDatabase& db) {
  AblationResult result;

  SuiteConfig with = cfg;
  with.run.no_affordance = false;
  result.with_regions = run_suite(experiments, with, backend, db);

  SuiteConfig without = cfg;
  without.run.no_affordance = true;
  result.without_regions = run_suite(experiments, without, backend, db);

  for (size_t i = 0; i < result.with_regions.reports.size(); ++i) {
    const ExperimentReport& a = result.with_regions.reports[i];
    const ExperimentReport& b = result.without_regions.reports[i];
    AblationRow row;
    row.experiment = a.experiment;
    row.trials = a.trials;
    row.milestone_with = a.milestone;
    row.full_with = a.full;
    row.milestone_without = b.milestone;
    row.full_without = b.full;
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string render_ablation_markdown(const AblationResult& result) {
  std::string out;
  out += "| task | trials | 75% with regions | 100% with regions | 75% centroid | 100% centroid |\n";
  out += "| --- | --- | --- | --- | --- | --- |\n";
  for (const auto& r : result.rows) {
    out += "| " + r.experiment + " | " + std::to_string(r.trials) + " | " +
           ratio(r.milestone_with, r.trials) + " | " + ratio(r.full_with, r.trials) + " | " +
           ratio(r.milestone_without, r.trials) + " | " + ratio(r.full_without, r.trials) + " |\n";
  }
  return out;
}

}  // namespace tabletop::harness
