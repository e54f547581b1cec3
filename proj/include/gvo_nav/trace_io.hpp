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

#ifndef GVO_NAV_TRACE_IO_HPP_
#define GVO_NAV_TRACE_IO_HPP_

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gvo_nav/episode.hpp"

namespace gvo_nav {

/// Column names of the trace CSV for `n_pedestrians` pedestrians:
/// step,time,x,y,theta,v,omega,mode,verdict_free,clearance,ped0_x,ped0_y,...
std::vector<std::string> trace_columns(std::size_t n_pedestrians);

/// One header line plus one row per TraceRecord. Numbers use a fixed
/// format so equal results give byte-identical files.
void write_trace_csv(std::ostream& out, const EpisodeResult& result);
std::string trace_csv(const EpisodeResult& result);

nlohmann::json episode_to_json(const EpisodeResult& result);
/// mean_time / std_time are null when no run succeeded.
nlohmann::json summary_to_json(const BatchSummary& summary, Method method, const std::string& scenario_name);

nlohmann::json tree_to_json(const TreeSnapshot& tree);
nlohmann::json plan_to_json(const PlanResult& plan);
nlohmann::json decision_to_json(const Decision& decision);

/// Throws std::runtime_error when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace gvo_nav

#endif  // GVO_NAV_TRACE_IO_HPP_
