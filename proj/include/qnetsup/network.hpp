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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qnetsup/engine.hpp"
#include "qnetsup/graphstate.hpp"

namespace qnetsup {

// Hands out one policy per measurement, in program order.
class PolicySource {
 public:
  PolicySource() = default;
  PolicySource(const Policy& p) : base_(p) {}  // NOLINT: implicit by design

  static PolicySource fixed(int outcome = 0) { return PolicySource(PostSelect{outcome}); }
  static PolicySource sampled(Rng& rng,
                              std::vector<std::vector<double>>* log = nullptr) {
    return PolicySource(Sample{&rng, log});
  }
  // Outcome 0 everywhere except the listed call indices.
  static PolicySource scripted(std::map<int, int> overrides) {
    PolicySource s(PostSelect{0});
    s.script_ = std::move(overrides);
    return s;
  }

  Policy next(int n_outcomes);
  int calls() const { return static_cast<int>(counts_.size()); }
  const std::vector<int>& outcome_counts() const { return counts_; }

 private:
  Policy base_ = PostSelect{0};
  std::map<int, int> script_;
  std::vector<int> counts_;
};

struct Device {
  std::string id;
  std::vector<std::string> resource_regs;
  std::vector<std::string> aux_regs;
  std::optional<std::string> request_reg;
  std::optional<std::string> addressing_reg;
  std::optional<std::string> activation_reg;

  bool owns(const std::string& label) const;
  void drop(const std::string& label);
};

struct NetworkState {
  std::vector<Device> devices;
  PureState global;
  Graph topology;
  std::string initiator;
  int branches = 1;
  // Initiator-held GHZ leg consumed by distribute_request.
  std::optional<std::string> request_leg;

  Device& device(const std::string& id);
  const Device& device(const std::string& id) const;
  // Device id owning the register, or "" when none does.
  std::string owner_of(const std::string& label) const;
  // Tensors `part` onto the global state and records ownership.
  void add_registers(const PureState& part, const std::vector<std::string>& owners,
                     bool resource = true);
  void drop_register(const std::string& label);
  // First device (in list order) whose request register is still live.
  std::optional<std::string> branch_register() const;
};

// Devices d0..d(n-1), each with a request register of dim m, plus the
// initiator's GHZ leg; global = ghz_state(n+1, m).
NetworkState make_request_network(const std::vector<std::string>& device_ids,
                                  int m, const std::string& initiator);

PureState prepare_weight_state(const std::vector<cplx>& alphas,
                               const std::string& label = "w");

struct DistributeResult {
  int outcome = 0;
  double probability = 0.0;
};
DistributeResult distribute_request(NetworkState& net, const PureState& weight,
                                    PolicySource& src);

// ---- branch programs --------------------------------------------------------

enum class StepKind { Noop, Unitary, Swap, Prepare, Measure, Correct, Rename, Embed };
enum class MeasureKind { Z, X, Bell, Merge, Basis };

struct Step {
  std::string device;
  StepKind kind = StepKind::Noop;
  std::vector<std::string> targets;
  Matrix matrix;
  // Prepare
  std::vector<RegisterId> new_regs;
  std::vector<std::string> owners;
  Vector amplitudes;
  // Measure
  std::string id;
  MeasureKind measure = MeasureKind::Z;
  std::vector<Vector> basis;
  bool keep = false;
  // Correct
  std::string measurement;
  std::map<int, Matrix> table;
  // Rename / Embed
  std::string from;
  std::string to;

  bool same_as(const Step& o) const;
};

namespace step {
Step noop();
Step unitary(const std::string& dev, const std::vector<std::string>& targets,
             const Matrix& u);
Step swap(const std::string& dev, const std::string& a, const std::string& b);
Step prepare(const std::vector<RegisterId>& regs,
             const std::vector<std::string>& owners, const Vector& amps);
Step measure_z(const std::string& dev, const std::string& id,
               const std::string& target, bool keep = false);
Step measure_x(const std::string& dev, const std::string& id,
               const std::string& target);
Step measure_bell(const std::string& dev, const std::string& id,
                  const std::string& q1, const std::string& q2);
Step measure_merge(const std::string& dev, const std::string& id,
                   const std::string& a1, const std::string& a2);
Step correct(const std::string& dev, const std::string& measurement,
             const std::vector<std::string>& targets, std::map<int, Matrix> table);
Step rename(const std::string& dev, const std::string& from, const std::string& to);
// Fuses qubits (hi, lo) into one 4-level register named `to` (|hi lo> -> |2hi+lo>).
Step embed(const std::string& dev, const std::string& hi, const std::string& lo,
           const std::string& to);
}  // namespace step

struct BranchProgram {
  int branch = 0;
  std::vector<Step> steps;
};

struct ProgramRun {
  std::map<std::string, int> outcomes;
  std::map<std::string, double> probabilities;
  int controlled_ops = 0;
  int unconditional_ops = 0;
};

// Steps run in lockstep: index s of every program executes together.
// Prepare/Measure/Rename/Embed must agree across programs and run once;
// Unitary/Swap/Correct run controlled on the step device's request register
// at the program's branch level.
ProgramRun apply_branch_programs(NetworkState& net,
                                 const std::vector<BranchProgram>& programs,
                                 PolicySource& src);

std::vector<int> collapse_to_single_control(NetworkState& net,
                                            const std::string& initiator,
                                            PolicySource& src);

enum class ControlBasis { Fourier, HadamardQubits };

struct BranchMarker {
  std::string reg;
  int level = 0;
};

struct DetachPlan {
  ControlBasis basis = ControlBasis::Fourier;
  // One marker per branch: a register level populated only in that branch.
  std::vector<BranchMarker> markers;
  // Outcome -> list of (targets, unitary) applied after the measurement.
  std::map<int, std::vector<std::pair<std::vector<std::string>, Matrix>>> table;
};

struct DetachResult {
  int outcome = 0;
  double probability = 0.0;
  double max_overlap = 0.0;
};

DetachResult detach_control(NetworkState& net, const std::string& initiator,
                            const DetachPlan& plan, PolicySource& src);

// Largest normalized overlap between distinct branch constituents.
double max_branch_overlap(const PureState& s, const std::string& control);

// ---- addressing -----------------------------------------------------------------

Matrix toffoli_operator(int d);
void addressing_activate(NetworkState& net, const std::string& device);

struct ProgramTable {
  std::map<int, Matrix> entries;
};

void program_gate(NetworkState& net, const std::string& device,
                  const ProgramTable& table, const std::string& program_reg,
                  const std::vector<std::string>& targets);

// ---- JSON topology ----------------------------------------------------------------

struct TopologyCheck {
  std::string name;
  std::string kind;  // "negativity" | "fidelity" | "norm"
  std::vector<std::string> keep;
  std::vector<std::string> side_a;
  std::vector<RegisterId> target_regs;
  Vector target;
  double expected = 0.0;
  double tolerance = 1e-6;
};

struct TopologyProgram {
  NetworkState net;
  std::vector<cplx> weights;
  std::vector<BranchProgram> programs;
  bool collapse = true;
  std::vector<TopologyCheck> checks;
};

TopologyProgram load_topology(const std::string& json_text);

}  // namespace qnetsup
