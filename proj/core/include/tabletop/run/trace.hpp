#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tabletop/plan/schema.hpp"
#include "tabletop/world/types.hpp"

namespace tabletop::run {

// One vision lookup recorded before execution starts.
struct GroundingRecord {
  std::string name;
  bool found = false;
  Eigen::Vector3d centroid{0, 0, 0};
  Eigen::Vector3d dims{0, 0, 0};
  double logit_sum = 0.0;
  int view_count = 0;
  std::string error;  // set when found == false
};

// How a tool was picked up, for the steps that routed through the grasp
// planner.
struct GraspTraceRecord {
  std::string object;
  std::optional<std::string> db_model;
  bool used_fallback = false;
  bool no_affordance = false;
  bool pixel_in_region = false;
  double align_iou = 0.0;
  double width_m = 0.0;
  double score = 0.0;
  Eigen::Vector3d tcp_position{0, 0, 0};
  double yaw_deg = 0.0;
};

struct EventRecord {
  std::string kind;
  std::map<std::string, std::string> detail;
};

struct StepRecord {
  std::string step;                  // serialized four-tuple
  std::vector<std::string> actions;  // serialized executed actions
  std::vector<EventRecord> events;
  std::optional<GraspTraceRecord> grasp;
  std::string verify;                // "pass" | "fail" | "unverifiable"
  std::string verify_reason;
};

struct ExecutionTrace {
  std::string query;
  std::uint64_t seed = 0;
  std::string backend;
  std::vector<plan::ObjectEntry> comprehension;
  std::vector<std::string> plan;  // serialized steps
  std::vector<GroundingRecord> groundings;
  std::vector<StepRecord> steps;
  std::string initial_world;  // serialized world documents
  std::string final_world;
  std::string status = "completed";  // completed | aborted | error
  std::string failure_stage;         // comprehension | planning | grounding | execution | verify
  std::string failure_reason;

  bool completed() const { return status == "completed"; }
};

std::string serialize_trace(const ExecutionTrace& trace);
ExecutionTrace parse_trace(const std::string& text);
void save_trace(const ExecutionTrace& trace, const std::filesystem::path& path);
ExecutionTrace load_trace(const std::filesystem::path& path);

}  // namespace tabletop::run
