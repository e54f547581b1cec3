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

#include "gvo_nav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <spdlog/spdlog.h>

namespace gvo_nav {

void PlanParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("PlanParams: ") + name + " must be > 0");
  };
  positive(node_density, "node_density");
  positive(phase1_density_ratio, "phase1_density_ratio");
  positive(max_edge_len, "max_edge_len");
  positive(dis_th, "dis_th");
  positive(angle_th, "angle_th");
  positive(goal_tol, "goal_tol");
  positive(trace_spacing, "trace_spacing");
  positive(max_curvature, "max_curvature");
  if (goal_bias < 0.0 || goal_bias >= 1.0) throw std::invalid_argument("PlanParams: goal_bias must be in [0, 1)");
  if (iteration_factor < 1) throw std::invalid_argument("PlanParams: iteration_factor must be >= 1");
  if (bounds && !(bounds->area() > 0.0)) throw std::invalid_argument("PlanParams: bounds must have positive area");
}

std::string_view plan_status_name(PlanStatus s) {
  switch (s) {
    case PlanStatus::kOk:
      return "ok";
    case PlanStatus::kNoPath:
      return "no_path";
    case PlanStatus::kInvalidEndpoint:
      return "invalid_endpoint";
    case PlanStatus::kSmoothingFailed:
      return "smoothing_failed";
  }
  return "unknown";
}

Vec2 ellipse_point(Vec2 start, Vec2 goal, double c_best, Vec2 u) {
  const double c_min = distance(start, goal);
  if (c_best < c_min) throw std::invalid_argument("ellipse_point: c_best < c_min");
  const Vec2 center = 0.5 * (start + goal);
  const double a = 0.5 * c_best;
  const double b = 0.5 * std::sqrt(std::max(0.0, c_best * c_best - c_min * c_min));
  const double ex = a * u.x;
  const double ey = b * u.y;
  if (c_min == 0.0) return {center.x + ex, center.y + ey};
  const double cs = (goal.x - start.x) / c_min;
  const double sn = (goal.y - start.y) / c_min;
  return {center.x + cs * ex - sn * ey, center.y + sn * ex + cs * ey};
}

Vec2 sample_ellipse(Vec2 start, Vec2 goal, double c_best, Rng& rng) {
  const double r = std::sqrt(rng.uniform());
  const double phi = 2.0 * kPi * rng.uniform();
  return ellipse_point(start, goal, c_best, {r * std::cos(phi), r * std::sin(phi)});
}

bool curvature_ok(Vec2 a, Vec2 b, Vec2 c, double angle_th) {
  if (a == b || b == c) return false;
  const double h1 = std::atan2(b.y - a.y, b.x - a.x);
  const double h2 = std::atan2(c.y - b.y, c.x - b.x);
  return std::abs(wrap_angle(h2 - h1)) < angle_th;
}

bool segment_clear(Vec2 a, Vec2 b, std::span<const Cluster> statics, double dis_th) {
  for (const Cluster& c : statics) {
    // Every point lies within radius of the centroid.
    if (point_segment_distance(c.centroid(), a, b) - c.radius() > dis_th) continue;
    const double d2 = kernels::min_segment_dist_sq(c.cloud(), a.x, a.y, b.x, b.y);
    if (!(std::sqrt(d2) > dis_th)) return false;
  }
  return true;
}

double clearance_to(Vec2 p, std::span<const Cluster> statics) {
  double best = std::numeric_limits<double>::infinity();
  for (const Cluster& c : statics) best = std::min(best, c.nearest_distance(p));
  return best;
}

namespace {

class NodeGrid {
 public:
  explicit NodeGrid(double cell) : cell_(cell) {}

  void insert(int id, Vec2 p) {
    const auto [cx, cy] = cell_of(p);
    cells_[key(cx, cy)].push_back(id);
    if (empty_) {
      lo_x_ = hi_x_ = cx;
      lo_y_ = hi_y_ = cy;
      empty_ = false;
    }
    lo_x_ = std::min(lo_x_, cx);
    hi_x_ = std::max(hi_x_, cx);
    lo_y_ = std::min(lo_y_, cy);
    hi_y_ = std::max(hi_y_, cy);
  }

  // Nearest node by Euclidean distance; ties go to the lower id.
  int nearest(Vec2 p, const std::vector<Vec2>& pos) const {
    if (empty_) return -1;
    const auto [cx, cy] = cell_of(p);
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    const std::int64_t max_ring =
        std::max({std::abs(cx - lo_x_), std::abs(cx - hi_x_), std::abs(cy - lo_y_), std::abs(cy - hi_y_)});
    for (std::int64_t r = 0; r <= max_ring; ++r) {
      for (std::int64_t dx = -r; dx <= r; ++dx) {
        for (std::int64_t dy = -r; dy <= r; ++dy) {
          if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
          const auto it = cells_.find(key(cx + dx, cy + dy));
          if (it == cells_.end()) continue;
          for (int id : it->second) {
            const Vec2 d = pos[static_cast<std::size_t>(id)] - p;
            const double d2 = dot(d, d);
            if (d2 < best_d2 || (d2 == best_d2 && id < best)) {
              best_d2 = d2;
              best = id;
            }
          }
        }
      }
      // Cells in ring r + 1 are at least r * cell away.
      const double reach = static_cast<double>(r) * cell_;
      if (best >= 0 && best_d2 <= reach * reach) break;
    }
    return best;
  }

  // Ids within `radius` of p, ascending.
  void within(Vec2 p, double radius, const std::vector<Vec2>& pos, std::vector<int>& out) const {
    out.clear();
    const auto [cx, cy] = cell_of(p);
    const auto span = static_cast<std::int64_t>(std::ceil(radius / cell_));
    const double r2 = radius * radius;
    for (std::int64_t dx = -span; dx <= span; ++dx) {
      for (std::int64_t dy = -span; dy <= span; ++dy) {
        const auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (int id : it->second) {
          const Vec2 d = pos[static_cast<std::size_t>(id)] - p;
          if (dot(d, d) <= r2) out.push_back(id);
        }
      }
    }
    std::sort(out.begin(), out.end());
  }

 private:
  std::pair<std::int64_t, std::int64_t> cell_of(Vec2 p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_)), static_cast<std::int64_t>(std::floor(p.y / cell_))};
  }
  static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
  }

  double cell_;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
  bool empty_ = true;
  std::int64_t lo_x_ = 0, hi_x_ = 0, lo_y_ = 0, hi_y_ = 0;
};

struct Constraints {
  std::span<const Cluster> statics;
  double dis_th;
  double angle_th;
  double max_edge_len;
  Bounds bounds;
};

class Tree {
 public:
  Tree(Vec2 root, const Constraints& k) : k_(k), grid_(k.max_edge_len) { add(root, -1, 0.0); }

  int size() const { return static_cast<int>(pos_.size()); }
  Vec2 pos(int i) const { return pos_[static_cast<std::size_t>(i)]; }
  int parent(int i) const { return parent_[static_cast<std::size_t>(i)]; }
  double cost(int i) const { return cost_[static_cast<std::size_t>(i)]; }

  // Appends a node without checks; used to seed a known-feasible chain.
  int add_unchecked(Vec2 p, int parent) { return add(p, parent, cost(parent) + distance(pos(parent), p)); }

  // One RRT* iteration toward `sample`. Returns true when a node was added.
  bool extend(Vec2 sample) {
    const int nearest = grid_.nearest(sample, pos_);
    const Vec2 from = pos(nearest);
    const double d = distance(from, sample);
    if (d < 1e-9) return false;
    const Vec2 x_new = d <= k_.max_edge_len ? sample : from + (k_.max_edge_len / d) * (sample - from);
    if (!k_.bounds.contains(x_new)) return false;

    grid_.within(x_new, k_.max_edge_len, pos_, near_);
    // Cheapest admissible parent.
    candidates_.clear();
    for (int id : near_) {
      const double dd = distance(pos(id), x_new);
      if (dd < 1e-9) return false;
      candidates_.emplace_back(cost(id) + dd, id);
    }
    std::sort(candidates_.begin(), candidates_.end());
    int chosen = -1;
    double chosen_cost = 0.0;
    for (const auto& [c, id] : candidates_) {
      if (!heading_ok(parent(id), id, x_new)) continue;
      if (!segment_clear(pos(id), x_new, k_.statics, k_.dis_th)) continue;
      chosen = id;
      chosen_cost = c;
      break;
    }
    if (chosen < 0) return false;
    const int added = add(x_new, chosen, chosen_cost);
    rewire(added);
    return true;
  }

  // Goal node with the smallest cost-to-node plus remaining distance.
  std::optional<std::pair<int, double>> best_goal(Vec2 goal, double goal_tol) const {
    std::optional<std::pair<int, double>> best;
    for (int i = 0; i < size(); ++i) {
      const double rest = distance(pos(i), goal);
      if (rest > goal_tol) continue;
      const double total = cost(i) + rest;
      if (!best || total < best->second) best = std::make_pair(i, total);
    }
    return best;
  }

  std::vector<int> chain_to(int node) const {
    std::vector<int> chain;
    for (int i = node; i >= 0; i = parent(i)) chain.push_back(i);
    std::reverse(chain.begin(), chain.end());
    return chain;
  }

  TreeSnapshot snapshot() const { return {pos_, parent_, cost_}; }

  bool heading_ok(int grandparent_of, int via, Vec2 to) const {
    if (grandparent_of < 0) return true;
    return curvature_ok(pos(grandparent_of), pos(via), to, k_.angle_th);
  }

 private:
  int add(Vec2 p, int parent, double c) {
    const int id = size();
    pos_.push_back(p);
    parent_.push_back(parent);
    cost_.push_back(c);
    children_.emplace_back();
    if (parent >= 0) children_[static_cast<std::size_t>(parent)].push_back(id);
    grid_.insert(id, p);
    return id;
  }

  void rewire(int x_new) {
    const Vec2 p_new = pos(x_new);
    const int p_parent = parent(x_new);
    for (int id : near_) {
      if (id == p_parent || parent(id) < 0) continue;
      const double via = cost(x_new) + distance(p_new, pos(id));
      if (!(via < cost(id) - 1e-12)) continue;
      if (!curvature_ok(pos(p_parent), p_new, pos(id), k_.angle_th)) continue;
      bool children_ok = true;
      for (int ch : children_[static_cast<std::size_t>(id)]) {
        if (!curvature_ok(p_new, pos(id), pos(ch), k_.angle_th)) {
          children_ok = false;
          break;
        }
      }
      if (!children_ok) continue;
      if (!segment_clear(p_new, pos(id), k_.statics, k_.dis_th)) continue;

      auto& siblings = children_[static_cast<std::size_t>(parent(id))];
      siblings.erase(std::find(siblings.begin(), siblings.end(), id));
      parent_[static_cast<std::size_t>(id)] = x_new;
      children_[static_cast<std::size_t>(x_new)].push_back(id);
      propagate(id, via - cost(id));
    }
  }

  void propagate(int root, double delta) {
    stack_.clear();
    stack_.push_back(root);
    while (!stack_.empty()) {
      const int n = stack_.back();
      stack_.pop_back();
      cost_[static_cast<std::size_t>(n)] += delta;
      for (int ch : children_[static_cast<std::size_t>(n)]) stack_.push_back(ch);
    }
  }

  const Constraints& k_;
  NodeGrid grid_;
  std::vector<Vec2> pos_;
  std::vector<int> parent_;
  std::vector<double> cost_;
  std::vector<std::vector<int>> children_;
  std::vector<int> near_;
  std::vector<std::pair<double, int>> candidates_;
  std::vector<int> stack_;
};

struct Solution {
  std::vector<Vec2> nodes;
  double cost = 0.0;
};

Solution extract(const Tree& tree, int goal_node, double rank_cost, Vec2 goal, const Constraints& k,
                 double min_append) {
  Solution s;
  const std::vector<int> chain = tree.chain_to(goal_node);
  for (int id : chain) s.nodes.push_back(tree.pos(id));
  s.cost = rank_cost;
  const Vec2 last = s.nodes.back();
  if (distance(last, goal) >= min_append && segment_clear(last, goal, k.statics, k.dis_th) &&
      (chain.size() < 2 || curvature_ok(tree.pos(chain[chain.size() - 2]), last, goal, k.angle_th))) {
    s.nodes.push_back(goal);
  }
  return s;
}

struct Attempt {
  PlanStatus status = PlanStatus::kNoPath;
  Solution solution;
  std::string message;
};

Attempt run_two_phase(Vec2 start, Vec2 goal, const Constraints& k, const PlanParams& params,
                      PlanDiagnostics& diag) {
  Rng rng(params.rng_seed);
  const double c_min = distance(start, goal);
  diag.c_min = c_min;

  // Phase 1: goal-biased RRT* over the bounds at reduced density. The node
  // budget is a minimum: sampling goes on until the goal region is reached or
  // the iteration cap runs out.
  const double density1 = params.node_density * params.phase1_density_ratio;
  const int budget1 = std::max(1, static_cast<int>(std::ceil(k.bounds.area() * density1)));
  Tree t1(start, k);
  int accepted = 0;
  bool reached = c_min <= params.goal_tol;
  for (int it = 0; it < budget1 * params.iteration_factor && (accepted < budget1 || !reached); ++it) {
    Vec2 sample = goal;
    if (rng.uniform() >= params.goal_bias) {
      sample = {rng.uniform(k.bounds.min.x, k.bounds.max.x), rng.uniform(k.bounds.min.y, k.bounds.max.y)};
    }
    if (t1.extend(sample)) {
      ++accepted;
      reached = reached || distance(t1.pos(t1.size() - 1), goal) <= params.goal_tol;
    }
  }
  diag.phase1_nodes = t1.size();
  diag.phase1_tree = t1.snapshot();
  const auto g1 = t1.best_goal(goal, params.goal_tol);
  if (!g1) return {PlanStatus::kNoPath, {}, "phase 1 found no goal connection"};
  const double c_best = std::max(g1->second, c_min);
  diag.c_best_phase1 = c_best;

  // Phase 2: fresh tree seeded with the phase-1 chain, samples only inside
  // the informed ellipse.
  Tree t2(start, k);
  {
    const std::vector<int> chain = t1.chain_to(g1->first);
    int prev = 0;
    for (std::size_t i = 1; i < chain.size(); ++i) prev = t2.add_unchecked(t1.pos(chain[i]), prev);
  }
  const double semi_major = 0.5 * c_best;
  const double semi_minor = 0.5 * std::sqrt(std::max(0.0, c_best * c_best - c_min * c_min));
  const double ellipse_area = kPi * semi_major * semi_minor;
  const int budget2 = static_cast<int>(std::ceil(ellipse_area * params.node_density));
  accepted = 0;
  for (int it = 0; it < budget2 * params.iteration_factor && accepted < budget2; ++it) {
    const Vec2 sample = sample_ellipse(start, goal, c_best, rng);
    diag.phase2_samples.push_back(sample);
    if (t2.extend(sample)) ++accepted;
  }
  diag.phase2_nodes = t2.size();
  diag.phase2_tree = t2.snapshot();
  const auto g2 = t2.best_goal(goal, params.goal_tol);
  // The seeded chain guarantees g2 exists with cost <= c_best.
  diag.cost_phase2 = g2->second;
  Attempt a;
  a.status = PlanStatus::kOk;
  a.solution = extract(t2, g2->first, g2->second, goal, k, params.trace_spacing);
  return a;
}

// Largest |curvature| and smallest static clearance along the trace.
std::pair<double, double> trace_extremes(const std::vector<TracePoint>& trace, std::span<const Cluster> statics) {
  double kmax = 0.0;
  double clear = std::numeric_limits<double>::infinity();
  for (const TracePoint& tp : trace) {
    kmax = std::max(kmax, std::abs(tp.curvature));
    clear = std::min(clear, clearance_to(tp.pose.position(), statics));
  }
  return {kmax, clear};
}

}  // namespace

PlanResult plan(Vec2 start, Vec2 goal, std::span<const Cluster> statics, const PlanParams& params) {
  params.validate();
  PlanResult result;
  Bounds bounds = params.bounds.value_or(
      Bounds{{std::min(start.x, goal.x) - 2.0, std::min(start.y, goal.y) - 2.0},
             {std::max(start.x, goal.x) + 2.0, std::max(start.y, goal.y) + 2.0}});
  if (!bounds.contains(start) || !bounds.contains(goal)) {
    result.status = PlanStatus::kInvalidEndpoint;
    result.message = "start or goal outside the planning bounds";
    return result;
  }
  if (clearance_to(start, statics) < params.dis_th) {
    result.status = PlanStatus::kInvalidEndpoint;
    result.message = "start clearance below dis_th";
    return result;
  }
  if (clearance_to(goal, statics) < params.dis_th) {
    result.status = PlanStatus::kInvalidEndpoint;
    result.message = "goal clearance below dis_th";
    return result;
  }

  double angle_th = params.angle_th;
  double dis_th = params.dis_th;
  for (int attempt = 0; attempt < 2; ++attempt) {
    PlanDiagnostics diag;
    diag.retries = attempt;
    diag.angle_th_used = angle_th;
    diag.dis_th_used = dis_th;
    const Constraints k{statics, dis_th, angle_th, params.max_edge_len, bounds};
    Attempt a = run_two_phase(start, goal, k, params, diag);
    result.diagnostics = std::move(diag);
    if (a.status != PlanStatus::kOk) {
      result.status = a.status;
      result.message = a.message;
      return result;
    }
    PlannedPath path;
    path.nodes = std::move(a.solution.nodes);
    path.cost = a.solution.cost;
    if (path.nodes.size() < 2 && !(goal == start)) path.nodes.push_back(goal);
    if (path.nodes.size() < 2) {
      // Start coincides with the goal.
      path.spline_trace.push_back(TracePoint{Pose(start.x, start.y, 0.0), Action{}, 0.0, 0.0});
      result.status = PlanStatus::kOk;
      result.path = std::move(path);
      return result;
    }
    path.spline_trace = smooth(path.nodes, params.trace_spacing, params.speed);
    const auto [kmax, clear] = trace_extremes(path.spline_trace, statics);
    if (kmax <= params.max_curvature && clear >= params.dis_th) {
      result.status = PlanStatus::kOk;
      result.path = std::move(path);
      return result;
    }
    spdlog::debug("plan: spline check failed (kappa {:.3f}, clearance {:.3f}), attempt {}", kmax, clear, attempt);
    angle_th *= params.retry_angle_scale;
    dis_th += params.retry_clearance_margin;
  }
  result.status = PlanStatus::kSmoothingFailed;
  result.message = "spline violates curvature or clearance after retry";
  return result;
}

}  // namespace gvo_nav
