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

#include "qnetsup/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qnetsup/ctrltask.hpp"

namespace qnetsup {

// ---- PolicySource -------------------------------------------------------------

Policy PolicySource::next(int n_outcomes) {
  const int idx = static_cast<int>(counts_.size());
  counts_.push_back(n_outcomes);
  auto it = script_.find(idx);
  if (it != script_.end()) return PostSelect{it->second};
  return base_;
}

// ---- Device / NetworkState ------------------------------------------------------

bool Device::owns(const std::string& label) const {
  auto in = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), label) != v.end();
  };
  return in(resource_regs) || in(aux_regs) || request_reg == label ||
         addressing_reg == label || activation_reg == label;
}

void Device::drop(const std::string& label) {
  auto rm = [&](std::vector<std::string>& v) {
    v.erase(std::remove(v.begin(), v.end(), label), v.end());
  };
  rm(resource_regs);
  rm(aux_regs);
  if (request_reg == label) request_reg.reset();
  if (addressing_reg == label) addressing_reg.reset();
  if (activation_reg == label) activation_reg.reset();
}

Device& NetworkState::device(const std::string& id) {
  for (auto& d : devices)
    if (d.id == id) return d;
  throw Error(ErrorCode::InvalidArgument, "unknown device '" + id + "'");
}

const Device& NetworkState::device(const std::string& id) const {
  for (const auto& d : devices)
    if (d.id == id) return d;
  throw Error(ErrorCode::InvalidArgument, "unknown device '" + id + "'");
}

std::string NetworkState::owner_of(const std::string& label) const {
  for (const auto& d : devices)
    if (d.owns(label)) return d.id;
  return "";
}

void NetworkState::add_registers(const PureState& part,
                                 const std::vector<std::string>& owners,
                                 bool resource) {
  if (owners.size() != part.registers().size())
    throw Error(ErrorCode::InvalidArgument, "one owner per new register");
  for (const auto& o : owners) device(o);
  global = global.registers().empty() ? part : tensor(global, part);
  for (std::size_t i = 0; i < owners.size(); ++i) {
    auto& d = device(owners[i]);
    (resource ? d.resource_regs : d.aux_regs).push_back(part.registers()[i].label);
  }
}

void NetworkState::drop_register(const std::string& label) {
  for (auto& d : devices) d.drop(label);
}

std::optional<std::string> NetworkState::branch_register() const {
  for (const auto& d : devices)
    if (d.request_reg && global.has(*d.request_reg)) return d.request_reg;
  return std::nullopt;
}

NetworkState make_request_network(const std::vector<std::string>& device_ids,
                                  int m, const std::string& initiator) {
  if (device_ids.empty())
    throw Error(ErrorCode::InvalidArgument, "network without devices");
  NetworkState net;
  net.initiator = initiator;
  std::vector<std::string> labels{initiator + ".leg"};
  for (const auto& id : device_ids) {
    Device d;
    d.id = id;
    d.request_reg = id + ".rq";
    labels.push_back(*d.request_reg);
    net.devices.push_back(d);
    net.topology.add_vertex(RegisterId{id, m});
  }
  net.device(initiator).aux_regs.push_back(labels[0]);
  net.request_leg = labels[0];
  net.global = ghz_state(static_cast<int>(labels.size()), m, labels);
  return net;
}

PureState prepare_weight_state(const std::vector<cplx>& alphas,
                               const std::string& label) {
  if (alphas.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "weight state needs m >= 2");
  Vector v(static_cast<Eigen::Index>(alphas.size()));
  for (std::size_t i = 0; i < alphas.size(); ++i) v[i] = alphas[i];
  if (std::abs(v.norm() - 1.0) > kAlgebraTol)
    throw Error(ErrorCode::InvalidArgument, "weights are not normalized");
  return PureState({{label, static_cast<int>(alphas.size())}}, v);
}

DistributeResult distribute_request(NetworkState& net, const PureState& weight,
                                    PolicySource& src) {
  if (!net.request_leg || !net.global.has(*net.request_leg))
    throw Error(ErrorCode::PreconditionFailed, "missing GHZ request resource");
  if (weight.registers().size() != 1)
    throw Error(ErrorCode::InvalidArgument, "weight state is one register");
  const int m = weight.registers()[0].dim;
  const std::string w = weight.registers()[0].label;
  const std::string leg = *net.request_leg;
  std::vector<std::string> ghz_regs{leg}, rq;
  for (const auto& d : net.devices)
    if (d.request_reg && net.global.has(*d.request_reg)) rq.push_back(*d.request_reg);
  if (rq.empty()) throw Error(ErrorCode::PreconditionFailed, "no request registers");
  ghz_regs.insert(ghz_regs.end(), rq.begin(), rq.end());
  for (const auto& l : ghz_regs)
    if (net.global.dim(l) != m)
      throw Error(ErrorCode::DimensionMismatch, "request resource dim != m");
  Vector ghz = ghz_state(static_cast<int>(ghz_regs.size()), m).amplitudes();
  if (projection_probability(net.global, ghz_regs, ghz) < 1.0 - kWeightTol)
    throw Error(ErrorCode::PreconditionFailed, "request resource is not GHZ");
  const auto& init = net.device(net.initiator);
  if (!init.request_reg)
    throw Error(ErrorCode::PreconditionFailed, "initiator has no request register");

  net.global = tensor(net.global, weight);
  auto o = bell_measure_inplace(net.global, w, leg, src.next(m * m));
  const int a = o.outcome / m, b = o.outcome % m;
  if (b != 0)
    for (const auto& r : rq)
      apply_unitary_inplace(net.global, {r}, gates::power(gates::x(m), b));
  if (a != 0)
    apply_unitary_inplace(net.global, {*init.request_reg},
                          gates::power(gates::z(m), a));
  net.drop_register(leg);
  net.request_leg.reset();
  net.branches = m;
  return {o.outcome, o.probability};
}

// ---- steps ------------------------------------------------------------------------

namespace {

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

bool same_vector(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.size() == 0 || a == b);
}

bool unconditional(StepKind k) {
  return k == StepKind::Prepare || k == StepKind::Measure ||
         k == StepKind::Rename || k == StepKind::Embed;
}

const char* kind_name(StepKind k) {
  switch (k) {
    case StepKind::Noop: return "noop";
    case StepKind::Unitary: return "unitary";
    case StepKind::Swap: return "swap";
    case StepKind::Prepare: return "prepare";
    case StepKind::Measure: return "measure";
    case StepKind::Correct: return "correct";
    case StepKind::Rename: return "rename";
    case StepKind::Embed: return "embed";
  }
  return "?";
}

}  // namespace

bool Step::same_as(const Step& o) const {
  if (device != o.device || kind != o.kind || targets != o.targets ||
      !same_matrix(matrix, o.matrix) || new_regs != o.new_regs ||
      owners != o.owners || !same_vector(amplitudes, o.amplitudes) || id != o.id ||
      measure != o.measure || keep != o.keep || measurement != o.measurement ||
      from != o.from || to != o.to || basis.size() != o.basis.size() ||
      table.size() != o.table.size())
    return false;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (!same_vector(basis[i], o.basis[i])) return false;
  for (auto it = table.begin(), jt = o.table.begin(); it != table.end(); ++it, ++jt)
    if (it->first != jt->first || !same_matrix(it->second, jt->second)) return false;
  return true;
}

namespace step {
Step noop() { return Step{}; }
Step unitary(const std::string& dev, const std::vector<std::string>& targets,
             const Matrix& u) {
  Step s;
  s.device = dev;
  s.kind = StepKind::Unitary;
  s.targets = targets;
  s.matrix = u;
  return s;
}
Step swap(const std::string& dev, const std::string& a, const std::string& b) {
  Step s;
  s.device = dev;
  s.kind = StepKind::Swap;
  s.targets = {a, b};
  return s;
}
Step prepare(const std::vector<RegisterId>& regs,
             const std::vector<std::string>& owners, const Vector& amps) {
  Step s;
  s.kind = StepKind::Prepare;
  s.new_regs = regs;
  s.owners = owners;
  s.amplitudes = amps;
  return s;
}
static Step measure_base(const std::string& dev, const std::string& id,
                         MeasureKind k, std::vector<std::string> targets) {
  Step s;
  s.device = dev;
  s.kind = StepKind::Measure;
  s.id = id;
  s.measure = k;
  s.targets = std::move(targets);
  return s;
}
Step measure_z(const std::string& dev, const std::string& id,
               const std::string& target, bool keep) {
  Step s = measure_base(dev, id, MeasureKind::Z, {target});
  s.keep = keep;
  return s;
}
Step measure_x(const std::string& dev, const std::string& id,
               const std::string& target) {
  return measure_base(dev, id, MeasureKind::X, {target});
}
Step measure_bell(const std::string& dev, const std::string& id,
                  const std::string& q1, const std::string& q2) {
  return measure_base(dev, id, MeasureKind::Bell, {q1, q2});
}
Step measure_merge(const std::string& dev, const std::string& id,
                   const std::string& a1, const std::string& a2) {
  return measure_base(dev, id, MeasureKind::Merge, {a1, a2});
}
Step correct(const std::string& dev, const std::string& measurement,
             const std::vector<std::string>& targets, std::map<int, Matrix> table) {
  Step s;
  s.device = dev;
  s.kind = StepKind::Correct;
  s.measurement = measurement;
  s.targets = targets;
  s.table = std::move(table);
  return s;
}
Step rename(const std::string& dev, const std::string& from, const std::string& to) {
  Step s;
  s.device = dev;
  s.kind = StepKind::Rename;
  s.from = from;
  s.to = to;
  return s;
}
Step embed(const std::string& dev, const std::string& hi, const std::string& lo,
           const std::string& to) {
  Step s;
  s.device = dev;
  s.kind = StepKind::Embed;
  s.targets = {hi, lo};
  s.to = to;
  return s;
}
}  // namespace step

namespace {

void require_owned(const NetworkState& net, const Step& s) {
  const auto& d = net.device(s.device);
  for (const auto& t : s.targets)
    if (!d.owns(t))
      throw Error(ErrorCode::InvalidArgument, "device '" + s.device +
                                                  "' references foreign register '" +
                                                  t + "'");
  if (s.kind == StepKind::Rename && !d.owns(s.from))
    throw Error(ErrorCode::InvalidArgument, "device '" + s.device +
                                                "' renames foreign register '" +
                                                s.from + "'");
}

std::vector<Matrix> measure_ops(const NetworkState& net, const Step& s,
                                std::vector<RegisterId>& outputs) {
  std::vector<Matrix> ops;
  auto rows_or_proj = [&](const std::vector<Vector>& basis) {
    for (const auto& v : basis)
      ops.push_back(s.keep ? Matrix(v * v.adjoint()) : Matrix(v.adjoint()));
  };
  switch (s.measure) {
    case MeasureKind::Z: {
      int d = net.global.dim(s.targets.at(0));
      std::vector<Vector> b;
      for (int k = 0; k < d; ++k) b.push_back(gates::basis_vector(d, k));
      rows_or_proj(b);
      break;
    }
    case MeasureKind::X: {
      int d = net.global.dim(s.targets.at(0));
      Matrix f = gates::fourier(d);
      std::vector<Vector> b;
      for (int k = 0; k < d; ++k) b.push_back(f.col(k));
      rows_or_proj(b);
      break;
    }
    case MeasureKind::Bell: {
      int d = net.global.dim(s.targets.at(0));
      if (s.targets.size() != 2 || net.global.dim(s.targets[1]) != d)
        throw Error(ErrorCode::DimensionMismatch, "Bell step needs a matched pair");
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) ops.push_back(gates::bell_vector(d, a, b).adjoint());
      break;
    }
    case MeasureKind::Merge:
      if (s.targets.size() != 2)
        throw Error(ErrorCode::InvalidArgument, "merge step needs two targets");
      ops = merging_operators();
      outputs = {{s.targets[0], 2}};
      break;
    case MeasureKind::Basis:
      rows_or_proj(s.basis);
      break;
  }
  return ops;
}

void run_once(NetworkState& net, const Step& s, ProgramRun& run,
              PolicySource& src, bool guard) {
  switch (s.kind) {
    case StepKind::Noop:
      return;
    case StepKind::Unitary:
      require_owned(net, s);
      apply_unitary_inplace(net.global, s.targets, s.matrix);
      break;
    case StepKind::Swap:
      require_owned(net, s);
      apply_unitary_inplace(net.global, s.targets,
                            gates::swap(net.global.dim(s.targets.at(0))));
      break;
    case StepKind::Prepare: {
      PureState part(s.new_regs, s.amplitudes);
      net.add_registers(part, s.owners, false);
      break;
    }
    case StepKind::Measure: {
      require_owned(net, s);
      if (run.outcomes.count(s.id))
        throw Error(ErrorCode::InvalidArgument, "duplicate measurement id '" + s.id + "'");
      std::vector<RegisterId> outputs;
      auto ops = measure_ops(net, s, outputs);
      if (guard) {
        auto br = net.branch_register();
        if (br) check_weight_preservation(net.global, *br, s.targets, ops);
      }
      auto o = measure_inplace(net.global, s.targets, ops,
                               src.next(static_cast<int>(ops.size())), outputs);
      run.outcomes[s.id] = o.outcome;
      run.probabilities[s.id] = o.probability;
      for (const auto& t : s.targets)
        if (!net.global.has(t)) net.drop_register(t);
      break;
    }
    case StepKind::Correct: {
      require_owned(net, s);
      auto it = run.outcomes.find(s.measurement);
      if (it == run.outcomes.end())
        throw Error(ErrorCode::InvalidArgument,
                    "correction references unknown measurement '" + s.measurement + "'");
      auto jt = s.table.find(it->second);
      if (jt != s.table.end()) apply_unitary_inplace(net.global, s.targets, jt->second);
      break;
    }
    case StepKind::Rename: {
      require_owned(net, s);
      rename_inplace(net.global, s.from, s.to);
      auto& d = net.device(s.device);
      d.drop(s.from);
      d.resource_regs.push_back(s.to);
      break;
    }
    case StepKind::Embed: {
      require_owned(net, s);
      net.global = embed_pair_as_qudit(net.global, s.targets.at(0), s.targets.at(1), s.to);
      auto& d = net.device(s.device);
      d.drop(s.targets[0]);
      d.drop(s.targets[1]);
      d.resource_regs.push_back(s.to);
      break;
    }
  }
  ++run.unconditional_ops;
}

void run_controlled(NetworkState& net, const Step& s, int level, ProgramRun& run) {
  if (s.kind == StepKind::Noop) return;
  require_owned(net, s);
  const auto& d = net.device(s.device);
  if (!d.request_reg || !net.global.has(*d.request_reg))
    throw Error(ErrorCode::PreconditionFailed,
                "device '" + s.device + "' has no live request register");
  const std::string& c = *d.request_reg;
  switch (s.kind) {
    case StepKind::Unitary:
      apply_controlled_inplace(net.global, c, level, s.targets, s.matrix);
      break;
    case StepKind::Swap:
      apply_controlled_inplace(net.global, c, level, s.targets,
                               gates::swap(net.global.dim(s.targets.at(0))));
      break;
    case StepKind::Correct: {
      auto it = run.outcomes.find(s.measurement);
      if (it == run.outcomes.end())
        throw Error(ErrorCode::InvalidArgument,
                    "correction references unknown measurement '" + s.measurement + "'");
      auto jt = s.table.find(it->second);
      if (jt != s.table.end())
        apply_controlled_inplace(net.global, c, level, s.targets, jt->second);
      break;
    }
    default:
      throw Error(ErrorCode::InvalidArgument, "step cannot run controlled");
  }
  ++run.controlled_ops;
}

}  // namespace

ProgramRun apply_branch_programs(NetworkState& net,
                                 const std::vector<BranchProgram>& programs,
                                 PolicySource& src) {
  if (programs.empty()) throw Error(ErrorCode::InvalidArgument, "no branch programs");
  const int m = static_cast<int>(programs.size());
  if (m > 1 && m != net.branches)
    throw Error(ErrorCode::InvalidArgument, "one program per branch required");
  std::vector<const BranchProgram*> by_branch(m, nullptr);
  for (const auto& p : programs) {
    if (p.branch < 0 || p.branch >= m || by_branch[p.branch])
      throw Error(ErrorCode::InvalidArgument, "branch indices must be 0..m-1, distinct");
    by_branch[p.branch] = &p;
  }
  const std::size_t len = programs.front().steps.size();
  for (const auto& p : programs)
    if (p.steps.size() != len)
      throw Error(ErrorCode::InvalidArgument, "programs differ in length; pad with noop");

  ProgramRun run;
  for (std::size_t i = 0; i < len; ++i) {
    const Step* lead = nullptr;
    bool any_uncond = false, all_same = true;
    for (int b = 0; b < m; ++b) {
      const Step& s = by_branch[b]->steps[i];
      if (unconditional(s.kind)) any_uncond = true;
      if (!lead) lead = &s;
      else if (!s.same_as(*lead)) all_same = false;
    }
    if (any_uncond) {
      if (!all_same) {
        std::ostringstream os;
        os << "step " << i << " (" << kind_name(lead->kind)
           << ") must be identical in every branch";
        throw Error(ErrorCode::InvalidArgument, os.str());
      }
      run_once(net, *lead, run, src, m > 1);
    } else if (m == 1 || all_same) {
      run_once(net, *lead, run, src, m > 1);
    } else {
      for (int b = 0; b < m; ++b) run_controlled(net, by_branch[b]->steps[i], b, run);
    }
  }
  return run;
}

std::vector<int> collapse_to_single_control(NetworkState& net,
                                            const std::string& initiator,
                                            PolicySource& src) {
  auto& init = net.device(initiator);
  if (!init.request_reg || !net.global.has(*init.request_reg))
    throw Error(ErrorCode::PreconditionFailed, "initiator has no request register");
  const std::string keep = *init.request_reg;
  const int m = net.global.dim(keep);
  std::vector<int> outcomes;
  int total = 0;
  for (auto& d : net.devices) {
    if (d.id == initiator || !d.request_reg || !net.global.has(*d.request_reg)) continue;
    auto o = generalized_x_measure_inplace(net.global, *d.request_reg, src.next(m));
    outcomes.push_back(o.outcome);
    total = (total + o.outcome) % m;
    d.request_reg.reset();
  }
  if (total != 0)
    apply_unitary_inplace(net.global, {keep}, gates::power(gates::z(m), total));
  return outcomes;
}

double max_branch_overlap(const PureState& s, const std::string& control) {
  const int m = s.dim(control);
  std::vector<Vector> br;
  for (int i = 0; i < m; ++i) {
    Vector v = slice(s, control, i);
    double n = v.norm();
    if (n > 1e-9) br.push_back(v / n);
  }
  double worst = 0;
  for (std::size_t i = 0; i < br.size(); ++i)
    for (std::size_t j = i + 1; j < br.size(); ++j)
      worst = std::max(worst, std::abs(br[i].dot(br[j])));
  return worst;
}

DetachResult detach_control(NetworkState& net, const std::string& initiator,
                            const DetachPlan& plan, PolicySource& src) {
  auto& init = net.device(initiator);
  if (!init.request_reg || !net.global.has(*init.request_reg))
    throw Error(ErrorCode::PreconditionFailed, "initiator holds no control");
  const std::string c = *init.request_reg;
  const int m = net.global.dim(c);

  DetachResult res;
  res.max_overlap = max_branch_overlap(net.global, c);
  if (res.max_overlap > kWeightTol) {
    std::ostringstream os;
    os << "branch constituents are not orthogonal: overlap " << res.max_overlap;
    throw Error(ErrorCode::NotOrthogonal, os.str());
  }

  Matrix basis;
  if (plan.basis == ControlBasis::Fourier) {
    basis = gates::fourier(m);
  } else {
    int q = 0;
    while ((1 << q) < m) ++q;
    if ((1 << q) != m)
      throw Error(ErrorCode::DimensionMismatch, "qubit basis needs a power-of-two control");
    basis = gates::hadamard_qubits(q);
  }

  std::vector<char> populated(m, 0);
  for (int i = 0; i < m; ++i) populated[i] = slice(net.global, c, i).norm() > 1e-9;

  if (!plan.markers.empty()) {
    if (static_cast<int>(plan.markers.size()) != m)
      throw Error(ErrorCode::InvalidArgument, "one marker per branch");
    std::set<std::pair<std::string, int>> seen;
    for (int i = 0; i < m; ++i) {
      const auto& mk = plan.markers[i];
      if (!seen.insert({mk.reg, mk.level}).second)
        throw Error(ErrorCode::InvalidArgument, "markers must be distinct");
      int d = net.global.dim(mk.reg);
      if (mk.level < 0 || mk.level >= d)
        throw Error(ErrorCode::IndexOutOfRange, "marker level out of range");
      Vector e = gates::basis_vector(d, mk.level);
      std::vector<Matrix> ops{e * e.adjoint(), Matrix::Identity(d, d) - e * e.adjoint()};
      auto by = outcome_probabilities_by_level(net.global, c, {mk.reg}, ops);
      for (int j = 0; j < m; ++j) {
        if (by[j].empty()) continue;
        bool ok = j == i ? by[j][0] > 1.0 - kWeightTol : by[j][0] < kZeroProbability;
        if (!ok)
          throw Error(ErrorCode::PreconditionFailed,
                      "marker '" + mk.reg + "' does not single out its branch");
      }
    }
  }

  std::vector<Matrix> rows;
  for (int k = 0; k < m; ++k) rows.push_back(basis.col(k).adjoint());
  auto o = measure_inplace(net.global, {c}, rows, src.next(m));
  res.outcome = o.outcome;
  res.probability = o.probability;

  if (!plan.markers.empty()) {
    for (int i = 0; i < m; ++i) {
      if (!populated[i]) continue;
      cplx amp = basis(i, o.outcome);  // branch i picked up conj(amp)
      cplx fix = amp / std::abs(amp);
      const auto& mk = plan.markers[i];
      apply_unitary_inplace(net.global, {mk.reg},
                            gates::level_phase(net.global.dim(mk.reg), mk.level, fix));
    }
  } else if (!plan.table.empty()) {
    auto it = plan.table.find(o.outcome);
    if (it != plan.table.end())
      for (const auto& [targets, u] : it->second)
        apply_unitary_inplace(net.global, targets, u);
  } else {
    std::optional<cplx> ref;
    for (int i = 0; i < m; ++i) {
      if (!populated[i]) continue;
      cplx amp = basis(i, o.outcome);
      if (!ref) ref = amp;
      else if (std::abs(amp - *ref) > 1e-12)
        throw Error(ErrorCode::PreconditionFailed,
                    "outcome leaves relative phases and no correction plan was given");
    }
  }
  init.request_reg.reset();
  return res;
}

// ---- addressing -----------------------------------------------------------------

Matrix toffoli_operator(int d) {
  // identity wherever ad != ac, X^s on rq where ad = ac = s
  Matrix t = Matrix::Zero(d * d * d, d * d * d);
  for (int p = 0; p < d; ++p)
    for (int s = 0; s < d; ++s) {
      Matrix pp = gates::basis_vector(d, p) * gates::basis_vector(d, p).adjoint();
      Matrix ps = gates::basis_vector(d, s) * gates::basis_vector(d, s).adjoint();
      Matrix act = p == s ? gates::power(gates::x(d), s) : gates::identity(d);
      t += gates::kron_all({pp, ps, act});
    }
  return t;
}

void addressing_activate(NetworkState& net, const std::string& device) {
  const auto& d = net.device(device);
  if (!d.addressing_reg || !d.activation_reg || !d.request_reg)
    throw Error(ErrorCode::PreconditionFailed, "device lacks ad/ac/rq registers");
  const int dim = net.global.dim(*d.request_reg);
  if (net.global.dim(*d.addressing_reg) != dim || net.global.dim(*d.activation_reg) != dim)
    throw Error(ErrorCode::DimensionMismatch, "ad, ac and rq must share a dimension");
  for (int s = 1; s < dim; ++s)
    apply_multi_controlled_inplace(net.global,
                                   {{*d.addressing_reg, s}, {*d.activation_reg, s}},
                                   {*d.request_reg}, gates::power(gates::x(dim), s));
}

void program_gate(NetworkState& net, const std::string& device,
                  const ProgramTable& table, const std::string& program_reg,
                  const std::vector<std::string>& targets) {
  const auto& d = net.device(device);
  for (const auto& t : targets)
    if (!d.owns(t))
      throw Error(ErrorCode::InvalidArgument, "program targets foreign register '" + t + "'");
  const int pd = net.global.dim(program_reg);
  for (const auto& [k, u] : table.entries)
    if (k < 0 || k >= pd)
      throw Error(ErrorCode::IndexOutOfRange, "program table index out of range");
  for (int k = 0; k < pd; ++k) {
    bool live = slice(net.global, program_reg, k).norm() > 1e-9;
    auto it = table.entries.find(k);
    if (it == table.entries.end()) {
      if (live)
        throw Error(ErrorCode::PreconditionFailed,
                    "program level " + std::to_string(k) + " populated but not in table");
      continue;
    }
    apply_controlled_inplace(net.global, program_reg, k, targets, it->second);
  }
}

}  // namespace qnetsup
