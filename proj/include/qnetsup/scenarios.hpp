// Copyright 2026 The qnetsup Authors
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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qnetsup {

// "published": value quoted for the construction; "analytic": follows by
// inspection; "computed": taken from an independent calculation.
struct Check {
  std::string name;
  std::variant<double, bool> expected;
  std::variant<double, bool> actual;
  double tolerance = 0.0;
  bool pass = false;
  std::string provenance;
};

struct ScenarioReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> parameters;
  std::vector<Check> checks;
  double wall_time_ms = 0.0;

  bool passed() const;
  // Sorted keys; wall_time_ms only when `timing` is set.
  std::string to_json(bool timing = false) const;
};

struct RunOptions {
  std::uint64_t seed = 1;
  bool sample = false;
  int reps = 10000;
  // Sweep every single-measurement deviation from the default outcomes.
  bool sweep = true;
  // Extra runs with random weights/inputs and sampled outcomes.
  int draws = 0;
};

const std::vector<std::string>& scenario_names();

// Throws Error(Config) for an unknown name.
ScenarioReport run_scenario(const std::string& name, const RunOptions& opts);

// Serialized bundle for several reports: {"all_pass":..,"reports":[..]}.
std::string reports_to_json(const std::vector<ScenarioReport>& reports, bool timing = false);

ScenarioReport scenario_ghz_superposition(const RunOptions& opts);
ScenarioReport scenario_smolin(const RunOptions& opts);
ScenarioReport scenario_entanglement_decision(const RunOptions& opts);
ScenarioReport scenario_ghz_cluster(const RunOptions& opts);
ScenarioReport scenario_destinations(const RunOptions& opts, int n = 3);
ScenarioReport scenario_paths(const RunOptions& opts);
ScenarioReport scenario_encoding(const RunOptions& opts,
                                 const std::string& zero_word = "000",
                                 const std::string& one_word = "111");
ScenarioReport scenario_addressing(const RunOptions& opts);
ScenarioReport scenario_nonlinearity(const RunOptions& opts);

// Runs a JSON network description (see docs/topology.md).
ScenarioReport run_topology(const std::string& json_text, const RunOptions& opts);

}  // namespace qnetsup
