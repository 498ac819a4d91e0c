#include "tabletop/run/trace.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tabletop/common/errors.hpp"

namespace tabletop::run {

using nlohmann::ordered_json;

namespace {

ordered_json vec_json(const Eigen::Vector3d& v) { return ordered_json{v.x(), v.y(), v.z()}; }

Eigen::Vector3d vec_from(const ordered_json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw Error(ErrorCode::ParseError, std::string("trace: ") + what + " must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string serialize_trace(const ExecutionTrace& trace) {
  ordered_json j;
  j["schema_version"] = 1;
  j["query"] = trace.query;
  j["seed"] = trace.seed;
  j["backend"] = trace.backend;
  j["status"] = trace.status;
  j["failure_stage"] = trace.failure_stage;
  j["failure_reason"] = trace.failure_reason;
  j["comprehension"] = ordered_json::array();
  for (const auto& entry : trace.comprehension) {
    j["comprehension"].push_back({{"name", entry.name}, {"is_tool", entry.is_tool}});
  }
  j["plan"] = trace.plan;
  j["groundings"] = ordered_json::array();
  for (const auto& g : trace.groundings) {
    ordered_json row;
    row["name"] = g.name;
    row["found"] = g.found;
    if (g.found) {
      row["centroid"] = vec_json(g.centroid);
      row["dims"] = vec_json(g.dims);
      row["logit_sum"] = g.logit_sum;
      row["view_count"] = g.view_count;
    } else {
      row["error"] = g.error;
    }
    j["groundings"].push_back(std::move(row));
  }
  j["steps"] = ordered_json::array();
  for (const auto& s : trace.steps) {
    ordered_json row;
    row["step"] = s.step;
    row["actions"] = s.actions;
    row["events"] = ordered_json::array();
    for (const auto& e : s.events) {
      row["events"].push_back({{"kind", e.kind}, {"detail", e.detail}});
    }
    if (s.grasp) {
      ordered_json g;
      g["object"] = s.grasp->object;
      g["db_model"] = s.grasp->db_model ? ordered_json(*s.grasp->db_model) : ordered_json(nullptr);
      g["used_fallback"] = s.grasp->used_fallback;
      g["no_affordance"] = s.grasp->no_affordance;
      g["pixel_in_region"] = s.grasp->pixel_in_region;
      g["align_iou"] = s.grasp->align_iou;
      g["width_m"] = s.grasp->width_m;
      g["score"] = s.grasp->score;
      g["tcp_position"] = vec_json(s.grasp->tcp_position);
      g["yaw_deg"] = s.grasp->yaw_deg;
      row["grasp"] = std::move(g);
    }
    row["verify"] = s.verify;
    row["verify_reason"] = s.verify_reason;
    j["steps"].push_back(std::move(row));
  }
  j["initial_world"] = trace.initial_world;
  j["final_world"] = trace.final_world;
  return j.dump(2) + "\n";
}

ExecutionTrace parse_trace(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("trace: ") + e.what());
  }
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
    throw Error(ErrorCode::ParseError, "trace: unsupported schema version");

  ExecutionTrace trace;
  trace.query = j.value("query", "");
  trace.seed = j.value("seed", std::uint64_t{0});
  trace.backend = j.value("backend", "");
  trace.status = j.value("status", "");
  trace.failure_stage = j.value("failure_stage", "");
  trace.failure_reason = j.value("failure_reason", "");
  for (const auto& entry : j.value("comprehension", ordered_json::array())) {
    trace.comprehension.push_back({entry.at("name").get<std::string>(),
                                   entry.at("is_tool").get<bool>()});
  }
  for (const auto& line : j.value("plan", ordered_json::array()))
    trace.plan.push_back(line.get<std::string>());
  for (const auto& row : j.value("groundings", ordered_json::array())) {
    GroundingRecord g;
    g.name = row.at("name").get<std::string>();
    g.found = row.at("found").get<bool>();
    if (g.found) {
      g.centroid = vec_from(row.at("centroid"), "grounding centroid");
      g.dims = vec_from(row.at("dims"), "grounding dims");
      g.logit_sum = row.at("logit_sum").get<double>();
      g.view_count = row.at("view_count").get<int>();
    } else {
      g.error = row.value("error", "");
    }
    trace.groundings.push_back(std::move(g));
  }
  for (const auto& row : j.value("steps", ordered_json::array())) {
    StepRecord s;
    s.step = row.at("step").get<std::string>();
    for (const auto& a : row.value("actions", ordered_json::array()))
      s.actions.push_back(a.get<std::string>());
    for (const auto& e : row.value("events", ordered_json::array())) {
      EventRecord ev;
      ev.kind = e.at("kind").get<std::string>();
      for (const auto& [key, value] : e.at("detail").items())
        ev.detail[key] = value.get<std::string>();
      s.events.push_back(std::move(ev));
    }
    if (row.contains("grasp")) {
      const auto& g = row["grasp"];
      GraspTraceRecord rec;
      rec.object = g.at("object").get<std::string>();
      if (!g.at("db_model").is_null()) rec.db_model = g["db_model"].get<std::string>();
      rec.used_fallback = g.at("used_fallback").get<bool>();
      rec.no_affordance = g.at("no_affordance").get<bool>();
      rec.pixel_in_region = g.at("pixel_in_region").get<bool>();
      rec.align_iou = g.at("align_iou").get<double>();
      rec.width_m = g.at("width_m").get<double>();
      rec.score = g.at("score").get<double>();
      rec.tcp_position = vec_from(g.at("tcp_position"), "grasp tcp");
      rec.yaw_deg = g.at("yaw_deg").get<double>();
      s.grasp = std::move(rec);
    }
    s.verify = row.value("verify", "");
    s.verify_reason = row.value("verify_reason", "");
    trace.steps.push_back(std::move(s));
  }
  trace.initial_world = j.value("initial_world", "");
  trace.final_world = j.value("final_world", "");
  return trace;
}

void save_trace(const ExecutionTrace& trace, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << serialize_trace(trace);
}

ExecutionTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

}  // namespace tabletop::run
