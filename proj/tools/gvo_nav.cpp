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

// Command-line front end: run, compare and validate scenarios.
//
// Exit codes: 0 success, 1 invalid scenario or arguments, 2 I/O error.
// GVO_NAV_LOG sets the log level (trace, debug, info, warn, error, off).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "gvo_nav/episode.hpp"
#include "gvo_nav/kernels.hpp"
#include "gvo_nav/scenario.hpp"
#include "gvo_nav/trace_io.hpp"

namespace fs = std::filesystem;
using namespace gvo_nav;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("gvo_nav");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("GVO_NAV_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honour exact names.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

void write_or_throw(const fs::path& path, const std::string& content) {
  try {
    write_text_file(path, content);
  } catch (const std::runtime_error& e) {
    throw IoFailure(e.what());
  }
}

std::string format_time(const std::optional<double>& t) { return t ? fmt::format("{:.2f}", *t) : "-"; }

struct RunArgs {
  std::string scenario;
  std::string method;
  int runs = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
  bool tree_debug = false;
  bool decision_debug = false;
};

Scenario prepare(const std::string& file, const std::string& method, std::optional<std::uint64_t> seed) {
  Scenario s = load_scenario(file);
  if (!method.empty()) s.method = parse_method(method);
  if (seed) s.seed = *seed;
  return s;
}

int cmd_run(const RunArgs& a) {
  const Scenario s = prepare(a.scenario, a.method, a.seed);
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw IoFailure(fmt::format("cannot create output directory '{}': {}", a.out, ec.message()));

  EpisodeOptions opts;
  opts.record_plans = a.tree_debug;
  opts.record_decisions = a.decision_debug;
  const BatchSummary summary = run_batch(s, a.runs, opts, a.jobs);
  const fs::path out(a.out);
  for (std::size_t i = 0; i < summary.results.size(); ++i) {
    const EpisodeResult& r = summary.results[i];
    write_or_throw(out / fmt::format("trace_{}.csv", i), trace_csv(r));
    if (a.decision_debug) {
      std::string lines;
      for (const DecisionRecord& d : r.decisions) {
        nlohmann::json j = decision_to_json(d.decision);
        j["step"] = d.step;
        lines += j.dump() + "\n";
      }
      write_or_throw(out / fmt::format("decisions_{}.jsonl", i), lines);
    }
  }
  if (a.tree_debug) {
    nlohmann::json runs = nlohmann::json::array();
    for (const EpisodeResult& r : summary.results) {
      nlohmann::json plans = nlohmann::json::array();
      for (const PlanResult& p : r.plans) plans.push_back(plan_to_json(p));
      runs.push_back({{"seed", r.seed}, {"plans", plans}});
    }
    write_or_throw(out / "tree_debug.json", runs.dump(1) + "\n");
  }
  write_or_throw(out / "summary.json", summary_to_json(summary, s.method, s.name).dump(2) + "\n");
  std::cout << fmt::format("{} [{}]: success_rate={:.2f} mean_time={} std_time={} ({} runs)\n", s.name,
                           method_name(s.method), summary.success_rate, format_time(summary.mean_time),
                           format_time(summary.std_time), summary.runs);
  return kExitOk;
}

int cmd_compare(const RunArgs& a) {
  Scenario s = prepare(a.scenario, "", a.seed);
  std::cout << fmt::format("{:<10} {:>6} {:>12} {:>10} {:>10} {:>11}\n", "method", "runs", "success_rate",
                           "mean_time", "std_time", "collisions");
  nlohmann::json all = nlohmann::json::array();
  for (Method m : {Method::kGvoOnly, Method::kGvoRrt}) {
    s.method = m;
    const BatchSummary summary = run_batch(s, a.runs, {}, a.jobs);
    int collisions = 0;
    for (const EpisodeResult& r : summary.results) collisions += r.collision ? 1 : 0;
    std::cout << fmt::format("{:<10} {:>6} {:>12.2f} {:>10} {:>10} {:>11}\n", method_name(m), summary.runs,
                             summary.success_rate, format_time(summary.mean_time), format_time(summary.std_time),
                             collisions);
    all.push_back(summary_to_json(summary, m, s.name));
  }
  if (!a.out.empty()) {
    std::error_code ec;
    fs::create_directories(a.out, ec);
    if (ec) throw IoFailure(fmt::format("cannot create output directory '{}': {}", a.out, ec.message()));
    write_or_throw(fs::path(a.out) / "summary.json", all.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_validate(const std::string& file) {
  const Scenario s = load_scenario(file);
  std::cout << fmt::format("{}: ok ({} static shapes, {} pedestrians)\n", s.name, s.static_shapes.size(),
                           s.pedestrians.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"GVO navigation simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run seeded episodes of a scenario");
  run->add_option("--scenario", run_args.scenario, "Scenario JSON file")->required();
  run->add_option("--method", run_args.method, "gvo or gvo-rrt (default: from the scenario)")
      ->check(CLI::IsMember({"gvo", "gvo-rrt"}));
  run->add_option("--runs", run_args.runs, "Number of episodes")->check(CLI::PositiveNumber);
  run->add_option("--seed", run_args.seed, "First seed (default: from the scenario)");
  run->add_option("--out", run_args.out, "Output directory")->required();
  run->add_option("--jobs", run_args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--tree-debug", run_args.tree_debug, "Write tree_debug.json with every planner tree");
  run->add_flag("--decision-debug", run_args.decision_debug, "Write decisions_<run>.jsonl");

  RunArgs cmp_args;
  auto* compare = app.add_subcommand("compare", "Run both methods and print a summary table");
  compare->add_option("--scenario", cmp_args.scenario, "Scenario JSON file")->required();
  compare->add_option("--runs", cmp_args.runs, "Episodes per method")->check(CLI::PositiveNumber);
  compare->add_option("--seed", cmp_args.seed, "First seed (default: from the scenario)");
  compare->add_option("--out", cmp_args.out, "Optional directory for summary.json");
  compare->add_option("--jobs", cmp_args.jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string validate_file;
  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("--scenario", validate_file, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (compare->parsed()) return cmd_compare(cmp_args);
    return cmd_validate(validate_file);
  } catch (const ScenarioIoError& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  } catch (const IoFailure& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  } catch (const ScenarioError& e) {
    spdlog::error("invalid scenario: {}", e.what());
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kExitInvalid;
  }
}
