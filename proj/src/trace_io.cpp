// Copyright 2026 The gvo_nav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gvo_nav/trace_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace gvo_nav {

using nlohmann::json;

namespace {

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string_view decision_kind_name(DecisionKind k) {
  switch (k) {
    case DecisionKind::kAccepted:
      return "accepted";
    case DecisionKind::kFallback:
      return "fallback";
    case DecisionKind::kStop:
      return "stop";
  }
  return "unknown";
}

}  // namespace

std::vector<std::string> trace_columns(std::size_t n_pedestrians) {
  std::vector<std::string> cols = {"step", "time", "x",    "y",            "theta",
                                   "v",    "omega", "mode", "verdict_free", "clearance"};
  for (std::size_t i = 0; i < n_pedestrians; ++i) {
    cols.push_back(fmt::format("ped{}_x", i));
    cols.push_back(fmt::format("ped{}_y", i));
  }
  return cols;
}

void write_trace_csv(std::ostream& out, const EpisodeResult& result) {
  const std::size_t n_peds = result.trace.empty() ? 0 : result.trace.front().pedestrians.size();
  out << fmt::format("{}\n", fmt::join(trace_columns(n_peds), ","));
  for (const TraceRecord& r : result.trace) {
    out << fmt::format("{},{:.4f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{},{},{:.9f}", r.step, r.time, r.pose.x,
                       r.pose.y, r.pose.theta, r.command.v, r.command.omega, control_mode_name(r.mode),
                       r.verdict_free ? 1 : 0, r.clearance);
    for (Vec2 p : r.pedestrians) out << fmt::format(",{:.9f},{:.9f}", p.x, p.y);
    out << '\n';
  }
}

std::string trace_csv(const EpisodeResult& result) {
  std::ostringstream out;
  write_trace_csv(out, result);
  return out.str();
}

json episode_to_json(const EpisodeResult& r) {
  return {{"seed", r.seed},
          {"method", std::string(method_name(r.method))},
          {"success", r.success},
          {"collision", r.collision},
          {"completion_time", r.success ? json(r.completion_time) : json(nullptr)},
          {"min_clearance", r.min_clearance},
          {"replan_count", r.replan_count},
          {"steps", r.trace.size()},
          {"failure_reason", r.failure_reason}};
}

json summary_to_json(const BatchSummary& s, Method method, const std::string& scenario_name) {
  json runs = json::array();
  for (const EpisodeResult& r : s.results) runs.push_back(episode_to_json(r));
  return {{"scenario", scenario_name},
          {"method", std::string(method_name(method))},
          {"runs", s.runs},
          {"success_rate", s.success_rate},
          {"mean_time", optional_number(s.mean_time)},
          {"std_time", optional_number(s.std_time)},
          {"results", runs}};
}

json tree_to_json(const TreeSnapshot& tree) {
  json nodes = json::array();
  for (Vec2 n : tree.nodes) nodes.push_back(vec_json(n));
  return {{"nodes", nodes}, {"parents", tree.parents}, {"costs", tree.costs}};
}

json plan_to_json(const PlanResult& p) {
  const PlanDiagnostics& d = p.diagnostics;
  json out = {{"status", std::string(plan_status_name(p.status))},
              {"message", p.message},
              {"c_min", d.c_min},
              {"c_best_phase1", d.c_best_phase1},
              {"cost_phase2", d.cost_phase2},
              {"retries", d.retries},
              {"angle_th_used", d.angle_th_used},
              {"dis_th_used", d.dis_th_used},
              {"phase1_tree", tree_to_json(d.phase1_tree)},
              {"phase2_tree", tree_to_json(d.phase2_tree)}};
  if (p.path) {
    json nodes = json::array();
    for (Vec2 n : p.path->nodes) nodes.push_back(vec_json(n));
    json trace = json::array();
    for (const TracePoint& tp : p.path->spline_trace) trace.push_back({tp.pose.x, tp.pose.y, tp.pose.theta});
    out["path"] = {{"cost", p.path->cost}, {"nodes", nodes}, {"trace", trace}};
  } else {
    out["path"] = nullptr;
  }
  return out;
}

json decision_to_json(const Decision& d) {
  json candidates = json::array();
  for (const ActionVerdict& c : d.candidates)
    candidates.push_back({{"v", c.action.v}, {"omega", c.action.omega}, {"free", c.free}, {"t_min", c.t_min}});
  return {{"kind", std::string(decision_kind_name(d.kind))},
          {"chosen", d.chosen},
          {"action", {{"v", d.action.v}, {"omega", d.action.omega}}},
          {"candidates", candidates}};
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  out << content;
  out.flush();
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace gvo_nav
