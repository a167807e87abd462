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

// qnetsup list
// qnetsup run <scenario|all|topology> [options]
// Exit codes: 0 every check passed, 1 some check failed, 2 usage or input error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qnetsup/qnetsup.h"

namespace {

int report_error(qns_status s) {
  std::cerr << "qnetsup: " << qns_status_name(s) << ": " << qns_last_error() << "\n";
  return 2;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superposed network task simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qns_version()));

  auto* list = app.add_subcommand("list", "List the built-in scenarios");

  auto* run = app.add_subcommand("run", "Run a scenario, all of them, or a JSON topology");
  std::string target;
  std::uint64_t seed = 1;
  bool sample = false, no_sweep = false, timing = false;
  int reps = 10000, draws = 0;
  std::string out_path, topology_path;
  run->add_option("target", target, "Scenario name, 'all' or 'topology'")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Seed (default: $QNETSUP_SEED or 1)");
  run->add_flag("--sample", sample, "Sample measurement outcomes instead of post-selecting");
  run->add_option("--reps", reps, "Redraws per logged outcome distribution in sample mode")
      ->check(CLI::PositiveNumber);
  run->add_option("--draws", draws, "Extra runs with random weights and inputs")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("--no-sweep", no_sweep, "Skip the per-outcome deviation sweep");
  run->add_option("--topology", topology_path, "Topology JSON file (target 'topology')");
  run->add_option("--out", out_path, "Write the JSON report here instead of stdout");
  run->add_flag("--timing", timing, "Include wall_time_ms in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    for (int i = 0; i < qns_scenario_count(); ++i) std::cout << qns_scenario_name(i) << "\n";
    return 0;
  }

  if (seed_opt->count() == 0) {
    if (const char* env = std::getenv("QNETSUP_SEED")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (!*env || *end) {
        std::cerr << "qnetsup: QNETSUP_SEED is not an unsigned integer: " << env << "\n";
        return 2;
      }
      seed = v;
    }
  }

  qns_options opts;
  qns_default_options(&opts);
  opts.seed = seed;
  opts.sample = sample ? 1 : 0;
  opts.reps = reps;
  opts.draws = draws;
  opts.sweep = no_sweep ? 0 : 1;
  opts.timing = timing ? 1 : 0;

  qns_report* rep = nullptr;
  qns_status st;
  if (target == "all") {
    st = qns_run_all(&opts, &rep);
  } else if (target == "topology") {
    if (topology_path.empty()) {
      std::cerr << "qnetsup: 'run topology' needs --topology FILE\n";
      return 2;
    }
    std::string text;
    if (!read_file(topology_path, text)) {
      std::cerr << "qnetsup: cannot read " << topology_path << "\n";
      return 2;
    }
    st = qns_run_topology(text.c_str(), &opts, &rep);
  } else {
    st = qns_run_scenario(target.c_str(), &opts, &rep);
  }
  if (st != QNS_OK) return report_error(st);

  const std::string json = std::string(qns_report_json(rep)) + "\n";
  if (out_path.empty()) {
    std::cout << json;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f || !(f << json)) {
      std::cerr << "qnetsup: cannot write " << out_path << "\n";
      qns_report_free(rep);
      return 2;
    }
  }
  for (int i = 0; i < qns_report_count(rep); ++i)
    std::cerr << (qns_report_scenario_passed(rep, i) ? "PASS " : "FAIL ")
              << qns_report_scenario(rep, i) << "\n";
  const int code = qns_report_passed(rep) ? 0 : 1;
  qns_report_free(rep);
  return code;
}
