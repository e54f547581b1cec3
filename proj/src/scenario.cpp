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

#include "gvo_nav/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace gvo_nav {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ScenarioError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ScenarioError(field, "must be finite");
  return v;
}

int as_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ScenarioError(field, "expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& field) {
  if (!j.is_boolean()) throw ScenarioError(field, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& field) {
  if (!j.is_string()) throw ScenarioError(field, "expected a string");
  return j.get<std::string>();
}

Vec2 as_vec2(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) throw ScenarioError(field, "expected [x, y]");
  return {as_number(j[0], field + "[0]"), as_number(j[1], field + "[1]")};
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(join(path, key), "missing required field");
  return *it;
}

void require_object(const json& j, const std::string& field) {
  if (!j.is_object()) throw ScenarioError(field, "expected an object");
}

// Applies each present key through its setter; any other key is an error.
using Setter = std::function<void(const json&, const std::string&)>;

void apply_fields(const json& obj, const std::string& path, const std::map<std::string, Setter>& setters) {
  require_object(obj, path);
  for (const auto& [key, value] : obj.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ScenarioError(join(path, key), "unknown field");
    it->second(value, join(path, key));
  }
}

Setter num(double& target) {
  return [&target](const json& j, const std::string& f) { target = as_number(j, f); };
}
Setter integer(int& target) {
  return [&target](const json& j, const std::string& f) { target = as_int(j, f); };
}
Setter boolean(bool& target) {
  return [&target](const json& j, const std::string& f) { target = as_bool(j, f); };
}
Setter cov2(std::optional<Eigen::Matrix2d>& target) {
  return [&target](const json& j, const std::string& f) {
    if (j.is_null()) {
      target.reset();
      return;
    }
    if (!j.is_array() || j.size() != 2) throw ScenarioError(f, "expected [[a, b], [c, d]]");
    Eigen::Matrix2d m;
    for (int r = 0; r < 2; ++r) {
      if (!j[r].is_array() || j[r].size() != 2) throw ScenarioError(f, "expected [[a, b], [c, d]]");
      for (int c = 0; c < 2; ++c) m(r, c) = as_number(j[r][c], f);
    }
    target = m;
  };
}

void apply_params(const json& j, const std::string& path, NavConfig& c) {
  const std::map<std::string, Setter> groups = {
      {"action_space", [&c](const json& g, const std::string& p) {
         apply_fields(g, p, {{"v_max", num(c.space.v_max)}, {"omega_max", num(c.space.omega_max)},
                             {"v_min", num(c.space.v_min)}});
       }},
      {"avoid", [&c](const json& g, const std::string& p) {
         auto& a = c.avoid;
         apply_fields(g, p, {{"t_s_th", num(a.t_s_th)}, {"t_d_th", num(a.t_d_th)}, {"t_c_th", num(a.t_c_th)},
                             {"p_th", num(a.p_th)}, {"delta_t", num(a.delta_t)},
                             {"radius_robot", num(a.radius_robot)}, {"dis_sta", num(a.dis_sta)},
                             {"n_samples", integer(a.n_samples)}, {"omega_weight", num(a.omega_weight)},
                             {"hard_floor", boolean(a.hard_floor)},
                             {"escape_inside", boolean(a.escape_inside)},
                             {"turn_in_place", boolean(a.turn_in_place)}, {"radius_human", num(a.radius_human)},
                             {"velocity_cov_prior", cov2(a.velocity_cov_prior)}});
       }},
      {"plan", [&c](const json& g, const std::string& p) {
         auto& a = c.plan;
         apply_fields(g, p, {{"node_density", num(a.node_density)},
                             {"phase1_density_ratio", num(a.phase1_density_ratio)},
                             {"max_edge_len", num(a.max_edge_len)}, {"dis_th", num(a.dis_th)},
                             {"angle_th", num(a.angle_th)}, {"goal_tol", num(a.goal_tol)},
                             {"goal_bias", num(a.goal_bias)}, {"iteration_factor", integer(a.iteration_factor)},
                             {"trace_spacing", num(a.trace_spacing)}, {"v_cruise", num(a.speed.v_cruise)},
                             {"accel", num(a.speed.accel)}, {"v_start", num(a.speed.v_start)},
                             {"max_curvature", num(a.max_curvature)},
                             {"retry_angle_scale", num(a.retry_angle_scale)},
                             {"retry_clearance_margin", num(a.retry_clearance_margin)}});
       }},
      {"follower", [&c](const json& g, const std::string& p) {
         auto& a = c.follower;
         apply_fields(g, p, {{"xi", num(a.xi)}, {"g", num(a.g)}, {"lookahead_steps", integer(a.lookahead_steps)}});
       }},
      {"tracking", [&c](const json& g, const std::string& p) {
         auto& a = c.tracking;
         apply_fields(g, p, {{"measurement_std", num(a.measurement_std)}, {"process_noise", num(a.process_noise)},
                             {"initial_velocity_var", num(a.initial_velocity_var)},
                             {"stale_after", num(a.stale_after)}, {"gate", num(a.gate)},
                             {"velocity_cov_prior", cov2(a.velocity_cov_prior)}});
       }},
      {"clustering", [&c](const json& g, const std::string& p) {
         apply_fields(g, p, {{"eps", num(c.clustering.eps)}, {"min_pts", integer(c.clustering.min_pts)}});
       }},
      {"classify", [&c](const json& g, const std::string& p) {
         apply_fields(g, p, {{"v_dyn_th", num(c.classify.v_dyn_th)}, {"gate", num(c.classify.gate)}});
       }},
      {"lidar", [&c](const json& g, const std::string& p) {
         auto& a = c.lidar;
         double fov_deg = a.fov * 180.0 / kPi;
         double res_deg = a.angular_resolution * 180.0 / kPi;
         apply_fields(g, p, {{"fov_deg", num(fov_deg)}, {"resolution_deg", num(res_deg)},
                             {"range_max", num(a.range_max)}, {"range_min", num(a.range_min)},
                             {"noise_std", num(a.noise_std)}});
         a.fov = fov_deg * kPi / 180.0;
         a.angular_resolution = res_deg * kPi / 180.0;
       }},
      {"episode", [&c](const json& g, const std::string& p) {
         apply_fields(g, p,
                      {{"dt", num(c.dt)}, {"goal_tol", num(c.goal_tol)}, {"robot_radius", num(c.robot_radius)},
                       {"gvo_only_speed_ratio", num(c.gvo_only_speed_ratio)},
                       {"gvo_only_heading_gain", num(c.gvo_only_heading_gain)},
                       {"track_seeding",
                        [&c](const json& v, const std::string& f) {
                          const std::string s = as_string(v, f);
                          if (s == "ground_truth") {
                            c.track_seeding = TrackSeeding::kGroundTruth;
                          } else if (s == "motion") {
                            c.track_seeding = TrackSeeding::kMotion;
                          } else {
                            throw ScenarioError(f, "expected \"ground_truth\" or \"motion\"");
                          }
                        }},
                       {"max_person_radius", num(c.max_person_radius)}, {"map_cell", num(c.map_cell)},
                       {"replan_cooldown", num(c.replan_cooldown)}, {"max_replans", integer(c.max_replans)}});
       }},
  };
  apply_fields(j, path, groups);
}

Shape parse_shape(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string type = as_string(require(j, "type", path), join(path, "type"));
  if (type == "box") {
    Box b;
    apply_fields(j, path,
                 {{"type", [](const json&, const std::string&) {}},
                  {"min", [&b](const json& v, const std::string& f) { b.min = as_vec2(v, f); }},
                  {"max", [&b](const json& v, const std::string& f) { b.max = as_vec2(v, f); }}});
    require(j, "min", path);
    require(j, "max", path);
    return b;
  }
  if (type == "disc") {
    Disc d;
    apply_fields(j, path,
                 {{"type", [](const json&, const std::string&) {}},
                  {"center", [&d](const json& v, const std::string& f) { d.center = as_vec2(v, f); }},
                  {"radius", num(d.radius)}});
    require(j, "center", path);
    require(j, "radius", path);
    return d;
  }
  throw ScenarioError(join(path, "type"), "expected \"box\" or \"disc\"");
}

PedestrianSpec parse_pedestrian(const json& j, const std::string& path) {
  PedestrianSpec spec;
  Pedestrian& p = spec.pedestrian;
  apply_fields(j, path,
               {{"start", [&p](const json& v, const std::string& f) { p.position = as_vec2(v, f); }},
                {"waypoints",
                 [&p](const json& v, const std::string& f) {
                   if (!v.is_array()) throw ScenarioError(f, "expected an array of [x, y]");
                   for (std::size_t i = 0; i < v.size(); ++i)
                     p.waypoints.push_back(as_vec2(v[i], fmt::format("{}[{}]", f, i)));
                 }},
                {"speed", num(p.speed)},
                {"radius", num(p.radius)},
                {"loop", boolean(p.loop)},
                {"start_delay", num(p.start_delay)},
                {"speed_jitter", num(spec.speed_jitter)},
                {"start_jitter", num(spec.start_jitter)},
                {"delay_jitter", num(spec.delay_jitter)}});
  require(j, "start", path);
  return spec;
}

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

}  // namespace

std::string_view method_name(Method m) { return m == Method::kGvoOnly ? "gvo" : "gvo-rrt"; }

Method parse_method(std::string_view text) {
  if (text == "gvo" || text == "GVO_ONLY") return Method::kGvoOnly;
  if (text == "gvo-rrt" || text == "GVO_RRT") return Method::kGvoRrt;
  throw std::invalid_argument(fmt::format("unknown method '{}' (expected gvo or gvo-rrt)", text));
}

NavConfig::NavConfig() {
  // The avoidance footprint carries a margin over the physical body so that
  // lidar noise and the discrete horizon cannot erode the true gap to zero.
  avoid.radius_robot = robot_radius + 0.1;
  // The trace must end well inside the episode's goal region.
  plan.goal_tol = 0.5 * goal_tol;
}

void NavConfig::validate() const {
  space.validate();
  avoid.validate();
  plan.validate();
  follower.validate();
  lidar.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("episode.dt must be > 0");
  if (!(goal_tol > 0.0)) throw std::invalid_argument("episode.goal_tol must be > 0");
  if (!(robot_radius > 0.0)) throw std::invalid_argument("episode.robot_radius must be > 0");
  if (!(gvo_only_speed_ratio > 0.0 && gvo_only_speed_ratio <= 1.0))
    throw std::invalid_argument("episode.gvo_only_speed_ratio must be in (0, 1]");
  if (!(map_cell > 0.0)) throw std::invalid_argument("episode.map_cell must be > 0");
  if (max_replans < 0) throw std::invalid_argument("episode.max_replans must be >= 0");
  if (!(tracking.measurement_std > 0.0)) throw std::invalid_argument("tracking.measurement_std must be > 0");
  if (!(clustering.eps > 0.0) || clustering.min_pts < 1)
    throw std::invalid_argument("clustering: eps must be > 0 and min_pts >= 1");
}

Scenario scenario_from_json(const json& j) {
  require_object(j, "");
  Scenario s;
  s.schema_version = as_int(require(j, "schema_version", ""), "schema_version");
  if (s.schema_version != kScenarioSchemaVersion)
    throw ScenarioError("schema_version", fmt::format("unsupported version {} (expected {})", s.schema_version,
                                                      kScenarioSchemaVersion));
  bool has_bounds = false;
  apply_fields(
      j, "",
      {{"schema_version", [](const json&, const std::string&) {}},
       {"name", [&s](const json& v, const std::string& f) { s.name = as_string(v, f); }},
       {"bounds",
        [&](const json& v, const std::string& f) {
          if (!v.is_array() || v.size() != 2) throw ScenarioError(f, "expected [[xmin, ymin], [xmax, ymax]]");
          s.bounds = {as_vec2(v[0], f + "[0]"), as_vec2(v[1], f + "[1]")};
          has_bounds = true;
        }},
       {"static_shapes",
        [&s](const json& v, const std::string& f) {
          if (!v.is_array()) throw ScenarioError(f, "expected an array");
          for (std::size_t i = 0; i < v.size(); ++i)
            s.static_shapes.push_back(parse_shape(v[i], fmt::format("{}[{}]", f, i)));
        }},
       {"pedestrians",
        [&s](const json& v, const std::string& f) {
          if (!v.is_array()) throw ScenarioError(f, "expected an array");
          for (std::size_t i = 0; i < v.size(); ++i)
            s.pedestrians.push_back(parse_pedestrian(v[i], fmt::format("{}[{}]", f, i)));
        }},
       {"robot_start",
        [&s](const json& v, const std::string& f) {
          double x = 0.0, y = 0.0, theta = 0.0;
          apply_fields(v, f, {{"x", num(x)}, {"y", num(y)}, {"theta", num(theta)}});
          require(v, "x", f);
          require(v, "y", f);
          s.robot_start = Pose(x, y, theta);
        }},
       {"robot_goal", [&s](const json& v, const std::string& f) { s.robot_goal = as_vec2(v, f); }},
       {"timeout", num(s.timeout)},
       {"method",
        [&s](const json& v, const std::string& f) {
          try {
            s.method = parse_method(as_string(v, f));
          } catch (const std::invalid_argument& e) {
            throw ScenarioError(f, e.what());
          }
        }},
       {"seed",
        [&s](const json& v, const std::string& f) {
          if (!v.is_number_unsigned()) throw ScenarioError(f, "expected a non-negative integer");
          s.seed = v.get<std::uint64_t>();
        }},
       {"params", [&s](const json& v, const std::string& f) { apply_params(v, f, s.config); }}});
  require(j, "robot_start", "");
  require(j, "robot_goal", "");
  if (!has_bounds) throw ScenarioError("bounds", "missing required field");
  if (!j.contains("params") || !j["params"].contains("plan") || !j["params"]["plan"].contains("goal_tol"))
    s.config.plan.goal_tol = 0.5 * s.config.goal_tol;
  validate_scenario(s);
  return s;
}

void validate_scenario(const Scenario& s) {
  if (s.schema_version != kScenarioSchemaVersion) throw ScenarioError("schema_version", "unsupported version");
  if (!(s.bounds.max.x > s.bounds.min.x && s.bounds.max.y > s.bounds.min.y))
    throw ScenarioError("bounds", "max must exceed min on both axes");
  if (!s.bounds.contains({s.robot_start.x, s.robot_start.y}))
    throw ScenarioError("robot_start", "outside bounds");
  if (!s.bounds.contains(s.robot_goal)) throw ScenarioError("robot_goal", "outside bounds");
  if (!(s.timeout > 0.0)) throw ScenarioError("timeout", "must be > 0");
  for (std::size_t i = 0; i < s.static_shapes.size(); ++i)
    if (!shape_valid(s.static_shapes[i]))
      throw ScenarioError(fmt::format("static_shapes[{}]", i), "degenerate shape");
  for (std::size_t i = 0; i < s.pedestrians.size(); ++i) {
    const auto& spec = s.pedestrians[i];
    const std::string f = fmt::format("pedestrians[{}]", i);
    if (!(spec.pedestrian.speed >= 0.0)) throw ScenarioError(f + ".speed", "must be >= 0");
    if (!(spec.pedestrian.radius > 0.0)) throw ScenarioError(f + ".radius", "must be > 0");
    if (!(spec.pedestrian.start_delay >= 0.0)) throw ScenarioError(f + ".start_delay", "must be >= 0");
    if (spec.speed_jitter < 0.0 || spec.start_jitter < 0.0 || spec.delay_jitter < 0.0)
      throw ScenarioError(f, "jitter half-widths must be >= 0");
    if (spec.speed_jitter > spec.pedestrian.speed) throw ScenarioError(f + ".speed_jitter", "exceeds speed");
  }
  try {
    s.config.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("params", e.what());
  }
}

Scenario parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ScenarioError("", fmt::format("parse error at line {}, column {}: {}", line, column, e.what()));
  }
  return scenario_from_json(j);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioIoError(fmt::format("cannot open scenario file '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw ScenarioIoError(fmt::format("cannot read scenario file '{}'", path.string()));
  return parse_scenario(buffer.str());
}

json scenario_to_json(const Scenario& s) {
  json shapes = json::array();
  for (const auto& shape : s.static_shapes) {
    if (const auto* b = std::get_if<Box>(&shape)) {
      shapes.push_back({{"type", "box"}, {"min", vec_json(b->min)}, {"max", vec_json(b->max)}});
    } else {
      const auto& d = std::get<Disc>(shape);
      shapes.push_back({{"type", "disc"}, {"center", vec_json(d.center)}, {"radius", d.radius}});
    }
  }
  json peds = json::array();
  for (const auto& spec : s.pedestrians) {
    const auto& p = spec.pedestrian;
    json wps = json::array();
    for (Vec2 w : p.waypoints) wps.push_back(vec_json(w));
    peds.push_back({{"start", vec_json(p.position)},
                    {"waypoints", wps},
                    {"speed", p.speed},
                    {"radius", p.radius},
                    {"loop", p.loop},
                    {"start_delay", p.start_delay},
                    {"speed_jitter", spec.speed_jitter},
                    {"start_jitter", spec.start_jitter},
                    {"delay_jitter", spec.delay_jitter}});
  }
  return {{"schema_version", s.schema_version},
          {"name", s.name},
          {"bounds", json::array({vec_json(s.bounds.min), vec_json(s.bounds.max)})},
          {"static_shapes", shapes},
          {"pedestrians", peds},
          {"robot_start", {{"x", s.robot_start.x}, {"y", s.robot_start.y}, {"theta", s.robot_start.theta}}},
          {"robot_goal", vec_json(s.robot_goal)},
          {"timeout", s.timeout},
          {"method", std::string(method_name(s.method))},
          {"seed", s.seed}};
}

}  // namespace gvo_nav
