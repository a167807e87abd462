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

#include "qnetsup/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace qnetsup {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::DuplicateRegister: return "duplicate_register";
    case ErrorCode::UnknownRegister: return "unknown_register";
    case ErrorCode::IndexOutOfRange: return "index_out_of_range";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::NotUnitary: return "not_unitary";
    case ErrorCode::IncompleteMeasurement: return "incomplete_measurement";
    case ErrorCode::ZeroProbability: return "zero_probability";
    case ErrorCode::WeightDrift: return "weight_drift";
    case ErrorCode::NotOrthogonal: return "not_orthogonal";
    case ErrorCode::PreconditionFailed: return "precondition_failed";
    case ErrorCode::Config: return "config";
    case ErrorCode::SizeLimit: return "size_limit";
  }
  return "unknown";
}

namespace {

std::size_t product_dim(const std::vector<RegisterId>& regs) {
  std::size_t n = 1;
  for (const auto& r : regs) {
    n *= static_cast<std::size_t>(r.dim);
    if (n > kMaxDimension)
      throw Error(ErrorCode::SizeLimit, "state dimension exceeds 2^20");
  }
  return n;
}

void check_registers(const std::vector<RegisterId>& regs) {
  std::set<std::string> seen;
  for (const auto& r : regs) {
    if (r.dim < 2)
      throw Error(ErrorCode::InvalidArgument,
                  "register '" + r.label + "' has dim < 2");
    if (!seen.insert(r.label).second)
      throw Error(ErrorCode::DuplicateRegister,
                  "duplicate register '" + r.label + "'");
  }
}

std::vector<std::size_t> strides_of(const std::vector<RegisterId>& regs) {
  std::vector<std::size_t> st(regs.size());
  std::size_t acc = 1;
  for (int i = static_cast<int>(regs.size()) - 1; i >= 0; --i) {
    st[i] = acc;
    acc *= static_cast<std::size_t>(regs[i].dim);
  }
  return st;
}

// Offsets of every joint index of `pos` (big-endian over the listed order).
std::vector<std::size_t> block_offsets(const std::vector<RegisterId>& regs,
                                       const std::vector<std::size_t>& st,
                                       const std::vector<int>& pos) {
  std::vector<std::size_t> off{0};
  for (int p : pos) {
    std::vector<std::size_t> next;
    next.reserve(off.size() * regs[p].dim);
    for (auto o : off)
      for (int j = 0; j < regs[p].dim; ++j) next.push_back(o + j * st[p]);
    off.swap(next);
  }
  return off;
}

// Calls fn(base) for every assignment of the registers not listed in
// `fixed` or `targets`. Fixed registers sit at their given level. Bases are
// visited in big-endian order of the free registers.
template <class F>
void for_each_block(const std::vector<RegisterId>& regs,
                    const std::vector<std::size_t>& st,
                    const std::vector<std::pair<int, int>>& fixed,
                    const std::vector<int>& targets, F&& fn) {
  std::vector<char> used(regs.size(), 0);
  std::size_t base0 = 0;
  for (auto [p, lvl] : fixed) {
    used[p] = 1;
    base0 += static_cast<std::size_t>(lvl) * st[p];
  }
  for (int p : targets) used[p] = 1;
  std::vector<int> free;
  for (std::size_t i = 0; i < regs.size(); ++i)
    if (!used[i]) free.push_back(static_cast<int>(i));
  std::vector<int> digit(free.size(), 0);
  std::size_t base = base0;
  while (true) {
    fn(base);
    int k = static_cast<int>(free.size()) - 1;
    while (k >= 0) {
      int p = free[k];
      if (++digit[k] < regs[p].dim) {
        base += st[p];
        break;
      }
      base -= static_cast<std::size_t>(regs[p].dim - 1) * st[p];
      digit[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
}

std::vector<int> positions_of(const PureState& s,
                              const std::vector<std::string>& labels) {
  std::vector<int> pos;
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second)
      throw Error(ErrorCode::DuplicateRegister, "register '" + l +
                                                    "' listed twice");
    pos.push_back(s.position(l));
  }
  return pos;
}

std::size_t joint_dim(const PureState& s, const std::vector<int>& pos) {
  std::size_t d = 1;
  for (int p : pos) d *= static_cast<std::size_t>(s.registers()[p].dim);
  return d;
}

void apply_block_matrix(PureState& s,
                        const std::vector<std::pair<int, int>>& fixed,
                        const std::vector<int>& tpos, const Matrix& u) {
  const auto& regs = s.registers();
  auto st = strides_of(regs);
  auto off = block_offsets(regs, st, tpos);
  const std::size_t D = off.size();
  Vector& a = s.mutable_amplitudes();
  Vector buf(D), out(D);
  for_each_block(regs, st, fixed, tpos, [&](std::size_t base) {
    for (std::size_t t = 0; t < D; ++t) buf[t] = a[base + off[t]];
    out.noalias() = u * buf;
    for (std::size_t t = 0; t < D; ++t) a[base + off[t]] = out[t];
  });
}

void check_kraus(const std::vector<Matrix>& kraus, std::size_t D) {
  if (kraus.empty())
    throw Error(ErrorCode::InvalidArgument, "empty measurement operator set");
  Matrix acc = Matrix::Zero(D, D);
  for (const auto& k : kraus) {
    if (static_cast<std::size_t>(k.cols()) != D)
      throw Error(ErrorCode::DimensionMismatch,
                  "measurement operator column count != target dimension");
    acc += k.adjoint() * k;
  }
  double dev = (acc - Matrix::Identity(D, D)).cwiseAbs().maxCoeff();
  if (dev > kAlgebraTol) {
    std::ostringstream os;
    os << "measurement operators incomplete: |sum K^dag K - 1|_inf = " << dev;
    throw Error(ErrorCode::IncompleteMeasurement, os.str());
  }
}

std::vector<double> kraus_norms(const PureState& s, const std::vector<int>& tpos,
                                const std::vector<Matrix>& kraus,
                                const std::vector<std::pair<int, int>>& fixed) {
  const auto& regs = s.registers();
  auto st = strides_of(regs);
  auto off = block_offsets(regs, st, tpos);
  const std::size_t D = off.size();
  const Vector& a = s.amplitudes();
  std::vector<double> p(kraus.size(), 0.0);
  std::vector<Vector> tmp;
  for (const auto& k : kraus) tmp.emplace_back(k.rows());
  Vector buf(D);
  for_each_block(regs, st, fixed, tpos, [&](std::size_t base) {
    for (std::size_t t = 0; t < D; ++t) buf[t] = a[base + off[t]];
    for (std::size_t k = 0; k < kraus.size(); ++k) {
      tmp[k].noalias() = kraus[k] * buf;
      p[k] += tmp[k].squaredNorm();
    }
  });
  return p;
}

// Applies a (possibly rectangular) operator and rewrites the layout: targets
// are removed and `outputs` inserted at the first target's position.
void apply_rectangular(PureState& s, const std::vector<int>& tpos,
                       const Matrix& k, const std::vector<RegisterId>& outputs) {
  const auto& regs = s.registers();
  std::size_t rows = 1;
  for (const auto& o : outputs) rows *= static_cast<std::size_t>(o.dim);
  if (rows != static_cast<std::size_t>(k.rows()))
    throw Error(ErrorCode::DimensionMismatch,
                "output registers do not match operator row count");
  std::set<int> tset(tpos.begin(), tpos.end());
  int first = *std::min_element(tpos.begin(), tpos.end());
  std::vector<RegisterId> nregs;
  std::vector<int> map_old_to_new(regs.size(), -1);
  std::vector<int> out_pos;
  for (int i = 0; i < static_cast<int>(regs.size()); ++i) {
    if (i == first)
      for (const auto& o : outputs) {
        out_pos.push_back(static_cast<int>(nregs.size()));
        nregs.push_back(o);
      }
    if (tset.count(i)) continue;
    map_old_to_new[i] = static_cast<int>(nregs.size());
    nregs.push_back(regs[i]);
  }
  check_registers(nregs);
  auto st = strides_of(regs);
  auto nst = strides_of(nregs);
  auto off = block_offsets(regs, st, tpos);
  auto noff = block_offsets(nregs, nst, out_pos);
  const std::size_t D = off.size();
  Vector out = Vector::Zero(static_cast<Eigen::Index>(product_dim(nregs)));
  const Vector& a = s.amplitudes();
  Vector buf(D), res(rows);
  // Free registers are visited in the same relative order in both layouts.
  std::vector<int> free;
  for (int i = 0; i < static_cast<int>(regs.size()); ++i)
    if (!tset.count(i)) free.push_back(i);
  std::vector<int> digit(free.size(), 0);
  std::size_t nbase = 0;
  for_each_block(regs, st, {}, tpos, [&](std::size_t base) {
    for (std::size_t t = 0; t < D; ++t) buf[t] = a[base + off[t]];
    res.noalias() = k * buf;
    for (std::size_t r = 0; r < rows; ++r) out[nbase + noff[r]] = res[r];
    int q = static_cast<int>(free.size()) - 1;
    while (q >= 0) {
      int p = free[q];
      std::size_t ns = nst[map_old_to_new[p]];
      if (++digit[q] < regs[p].dim) {
        nbase += ns;
        break;
      }
      nbase -= static_cast<std::size_t>(regs[p].dim - 1) * ns;
      digit[q] = 0;
      --q;
    }
  });
  s.reset(std::move(nregs), std::move(out));
}

int choose_outcome(const std::vector<double>& probs, const Policy& policy) {
  if (std::holds_alternative<PostSelect>(policy)) {
    int k = std::get<PostSelect>(policy).outcome;
    if (k < 0 || k >= static_cast<int>(probs.size()))
      throw Error(ErrorCode::IndexOutOfRange, "post-selected outcome out of range");
    if (probs[k] <= kZeroProbability) {
      std::ostringstream os;
      os << "post-selection on outcome " << k << " with probability "
         << probs[k];
      throw Error(ErrorCode::ZeroProbability, os.str());
    }
    return k;
  }
  const Sample& smp = std::get<Sample>(policy);
  if (!smp.rng) throw Error(ErrorCode::InvalidArgument, "Sample policy without rng");
  if (smp.log) smp.log->push_back(probs);
  return sample_index(probs, *smp.rng);
}

}  // namespace

// ---- PureState --------------------------------------------------------------

PureState::PureState(std::vector<RegisterId> regs, Vector amps) {
  check_registers(regs);
  if (product_dim(regs) != static_cast<std::size_t>(amps.size()))
    throw Error(ErrorCode::DimensionMismatch,
                "amplitude vector length != product of register dims");
  double n = amps.norm();
  if (std::abs(n - 1.0) > kAlgebraTol)
    throw Error(ErrorCode::InvalidArgument, "state is not normalized");
  regs_ = std::move(regs);
  amps_ = std::move(amps);
}

void PureState::reset(std::vector<RegisterId> regs, Vector amps) {
  regs_ = std::move(regs);
  amps_ = std::move(amps);
}

bool PureState::has(const std::string& label) const {
  for (const auto& r : regs_)
    if (r.label == label) return true;
  return false;
}

int PureState::position(const std::string& label) const {
  for (std::size_t i = 0; i < regs_.size(); ++i)
    if (regs_[i].label == label) return static_cast<int>(i);
  throw Error(ErrorCode::UnknownRegister, "unknown register '" + label + "'");
}

int PureState::dim(const std::string& label) const {
  return regs_[position(label)].dim;
}

std::size_t PureState::stride(int pos) const { return strides_of(regs_)[pos]; }

std::vector<std::string> PureState::labels() const {
  std::vector<std::string> out;
  for (const auto& r : regs_) out.push_back(r.label);
  return out;
}

cplx PureState::amplitude(const std::map<std::string, int>& digits) const {
  if (digits.size() != regs_.size())
    throw Error(ErrorCode::InvalidArgument, "amplitude lookup needs every register");
  auto st = strides_of(regs_);
  std::size_t idx = 0;
  for (const auto& [label, v] : digits) {
    int p = position(label);
    if (v < 0 || v >= regs_[p].dim)
      throw Error(ErrorCode::IndexOutOfRange, "digit out of range");
    idx += static_cast<std::size_t>(v) * st[p];
  }
  return amps_[static_cast<Eigen::Index>(idx)];
}

int DensityState::position(const std::string& label) const {
  for (std::size_t i = 0; i < registers.size(); ++i)
    if (registers[i].label == label) return static_cast<int>(i);
  throw Error(ErrorCode::UnknownRegister, "unknown register '" + label + "'");
}

std::vector<std::string> DensityState::labels() const {
  std::vector<std::string> out;
  for (const auto& r : registers) out.push_back(r.label);
  return out;
}

// ---- construction -----------------------------------------------------------

PureState new_state(const std::vector<RegisterId>& specs,
                    const std::vector<int>& basis_index) {
  check_registers(specs);
  if (specs.size() != basis_index.size())
    throw Error(ErrorCode::InvalidArgument, "one basis index per register");
  auto st = strides_of(specs);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (basis_index[i] < 0 || basis_index[i] >= specs[i].dim)
      throw Error(ErrorCode::IndexOutOfRange,
                  "basis index out of range for '" + specs[i].label + "'");
    idx += static_cast<std::size_t>(basis_index[i]) * st[i];
  }
  Vector v = Vector::Zero(static_cast<Eigen::Index>(product_dim(specs)));
  v[static_cast<Eigen::Index>(idx)] = 1.0;
  return PureState(specs, v);
}

PureState from_amplitudes(const std::vector<RegisterId>& specs,
                          const Vector& amps) {
  return PureState(specs, amps);
}

PureState tensor(const PureState& a, const PureState& b) {
  std::vector<RegisterId> regs = a.registers();
  regs.insert(regs.end(), b.registers().begin(), b.registers().end());
  check_registers(regs);
  product_dim(regs);
  Vector v(static_cast<Eigen::Index>(a.size() * b.size()));
  const Eigen::Index nb = static_cast<Eigen::Index>(b.size());
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i)
    v.segment(i * nb, nb) = a.amplitudes()[i] * b.amplitudes();
  PureState out;
  out.reset(std::move(regs), std::move(v));
  return out;
}

void append(PureState& state, const PureState& other) {
  state = tensor(state, other);
}

// ---- unitaries --------------------------------------------------------------

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0) return false;
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()))
             .cwiseAbs()
             .maxCoeff() <= tol;
}

static void check_unitary_for(const PureState& s, const std::vector<int>& tpos,
                              const Matrix& u) {
  if (static_cast<std::size_t>(u.rows()) != joint_dim(s, tpos) ||
      u.rows() != u.cols())
    throw Error(ErrorCode::DimensionMismatch,
                "unitary size does not match target dimension");
  if (!is_unitary(u))
    throw Error(ErrorCode::NotUnitary, "matrix is not unitary within 1e-10");
}

void apply_unitary_inplace(PureState& s, const std::vector<std::string>& targets,
                           const Matrix& u) {
  auto tpos = positions_of(s, targets);
  check_unitary_for(s, tpos, u);
  apply_block_matrix(s, {}, tpos, u);
}

void apply_multi_controlled_inplace(
    PureState& s, const std::vector<std::pair<std::string, int>>& controls,
    const std::vector<std::string>& targets, const Matrix& u) {
  auto tpos = positions_of(s, targets);
  check_unitary_for(s, tpos, u);
  std::vector<std::pair<int, int>> fixed;
  for (const auto& [label, lvl] : controls) {
    int p = s.position(label);
    if (std::find(tpos.begin(), tpos.end(), p) != tpos.end())
      throw Error(ErrorCode::InvalidArgument, "control register is also a target");
    for (auto& f : fixed)
      if (f.first == p)
        throw Error(ErrorCode::DuplicateRegister, "control listed twice");
    if (lvl < 0 || lvl >= s.registers()[p].dim)
      throw Error(ErrorCode::IndexOutOfRange, "control level out of range");
    fixed.emplace_back(p, lvl);
  }
  apply_block_matrix(s, fixed, tpos, u);
}

void apply_controlled_inplace(PureState& s, const std::string& control,
                              int active_level,
                              const std::vector<std::string>& targets,
                              const Matrix& u) {
  apply_multi_controlled_inplace(s, {{control, active_level}}, targets, u);
}

void fredkin_inplace(PureState& s, const std::string& control,
                     const std::string& a, const std::string& b,
                     int active_level) {
  int da = s.dim(a), db = s.dim(b);
  if (da != db)
    throw Error(ErrorCode::DimensionMismatch, "swapped registers differ in dim");
  apply_controlled_inplace(s, control, active_level, {a, b}, gates::swap(da));
}

PureState apply_unitary(PureState s, const std::vector<std::string>& targets,
                        const Matrix& u) {
  apply_unitary_inplace(s, targets, u);
  return s;
}

PureState apply_controlled(PureState s, const std::string& control,
                           int active_level,
                           const std::vector<std::string>& targets,
                           const Matrix& u) {
  apply_controlled_inplace(s, control, active_level, targets, u);
  return s;
}

PureState fredkin(PureState s, const std::string& control, const std::string& a,
                  const std::string& b, int active_level) {
  fredkin_inplace(s, control, a, b, active_level);
  return s;
}

// ---- measurement --------------------------------------------------------------

std::vector<double> outcome_probabilities(const PureState& s,
                                          const std::vector<std::string>& targets,
                                          const std::vector<Matrix>& kraus) {
  auto tpos = positions_of(s, targets);
  check_kraus(kraus, joint_dim(s, tpos));
  auto p = kraus_norms(s, tpos, kraus, {});
  double tot = 0;
  for (double x : p) tot += x;
  for (double& x : p) x /= tot;
  return p;
}

std::vector<std::vector<double>> outcome_probabilities_by_level(
    const PureState& s, const std::string& control,
    const std::vector<std::string>& targets, const std::vector<Matrix>& kraus) {
  auto tpos = positions_of(s, targets);
  int cpos = s.position(control);
  if (std::find(tpos.begin(), tpos.end(), cpos) != tpos.end())
    throw Error(ErrorCode::InvalidArgument, "control register is measured");
  check_kraus(kraus, joint_dim(s, tpos));
  std::vector<std::vector<double>> out(s.registers()[cpos].dim);
  for (int lvl = 0; lvl < s.registers()[cpos].dim; ++lvl) {
    auto p = kraus_norms(s, tpos, kraus, {{cpos, lvl}});
    double w = 0;
    for (double x : p) w += x;
    if (w <= kZeroProbability) continue;
    for (double& x : p) x /= w;
    out[lvl] = p;
  }
  return out;
}

int sample_index(const std::vector<double>& probs, Rng& rng) {
  double u = rng.uniform();
  double acc = 0;
  int last = -1;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= kZeroProbability) continue;
    last = static_cast<int>(k);
    acc += probs[k];
    if (u < acc) return last;
  }
  if (last < 0) throw Error(ErrorCode::ZeroProbability, "no outcome possible");
  return last;
}

Outcome measure_inplace(PureState& s, const std::vector<std::string>& targets,
                        const std::vector<Matrix>& kraus, const Policy& policy,
                        const std::vector<RegisterId>& outputs) {
  auto tpos = positions_of(s, targets);
  const std::size_t D = joint_dim(s, tpos);
  check_kraus(kraus, D);
  auto p = kraus_norms(s, tpos, kraus, {});
  double tot = 0;
  for (double x : p) tot += x;
  for (double& x : p) x /= tot;
  int k = choose_outcome(p, policy);
  const Matrix& K = kraus[k];
  bool square = static_cast<std::size_t>(K.rows()) == D;
  if (square && outputs.empty()) {
    apply_block_matrix(s, {}, tpos, K);
  } else {
    if (outputs.empty() && K.rows() != 1)
      throw Error(ErrorCode::InvalidArgument,
                  "rectangular operator needs output registers");
    apply_rectangular(s, tpos, K, outputs);
  }
  s.mutable_amplitudes() /= s.amplitudes().norm();
  return {k, p[k]};
}

MeasurementRecord measure(const PureState& s,
                          const std::vector<std::string>& targets,
                          const std::vector<Matrix>& kraus, const Policy& policy,
                          const std::vector<RegisterId>& outputs) {
  PureState t = s;
  auto o = measure_inplace(t, targets, kraus, policy, outputs);
  return {o.outcome, o.probability, std::move(t)};
}

Outcome bell_measure_inplace(PureState& s, const std::string& q1,
                             const std::string& q2, const Policy& policy) {
  int d = s.dim(q1);
  if (s.dim(q2) != d)
    throw Error(ErrorCode::DimensionMismatch, "Bell measurement needs equal dims");
  std::vector<Matrix> rows;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      rows.push_back(gates::bell_vector(d, a, b).adjoint());
  return measure_inplace(s, {q1, q2}, rows, policy);
}

MeasurementRecord bell_measure(const PureState& s, const std::string& q1,
                               const std::string& q2, const Policy& policy) {
  PureState t = s;
  auto o = bell_measure_inplace(t, q1, q2, policy);
  return {o.outcome, o.probability, std::move(t)};
}

Outcome generalized_x_measure_inplace(PureState& s, const std::string& target,
                                      const Policy& policy) {
  int d = s.dim(target);
  Matrix f = gates::fourier(d);
  std::vector<Matrix> rows;
  for (int k = 0; k < d; ++k) rows.push_back(f.col(k).adjoint());
  return measure_inplace(s, {target}, rows, policy);
}

MeasurementRecord generalized_x_measure(const PureState& s,
                                        const std::string& target,
                                        const Policy& policy) {
  PureState t = s;
  auto o = generalized_x_measure_inplace(t, target, policy);
  return {o.outcome, o.probability, std::move(t)};
}

Outcome z_measure_inplace(PureState& s, const std::string& target,
                          const Policy& policy, bool keep) {
  int d = s.dim(target);
  std::vector<Matrix> ops;
  for (int k = 0; k < d; ++k) {
    Vector e = gates::basis_vector(d, k);
    ops.push_back(keep ? Matrix(e * e.adjoint()) : Matrix(e.adjoint()));
  }
  return measure_inplace(s, {target}, ops, policy);
}

Outcome basis_measure_inplace(PureState& s, const std::string& target,
                              const std::vector<Vector>& basis,
                              const Policy& policy) {
  std::vector<Matrix> ops;
  for (const auto& v : basis) ops.push_back(v * v.adjoint());
  return measure_inplace(s, {target}, ops, policy);
}

// ---- reduction ----------------------------------------------------------------

DensityState partial_trace(const PureState& s,
                           const std::vector<std::string>& keep) {
  if (keep.empty())
    throw Error(ErrorCode::InvalidArgument, "partial trace keeps nothing");
  auto kpos = positions_of(s, keep);
  const auto& regs = s.registers();
  auto st = strides_of(regs);
  auto off = block_offsets(regs, st, kpos);
  const std::size_t D = off.size();
  const std::size_t E = s.size() / D;
  Matrix m(D, E);
  std::size_t e = 0;
  const Vector& a = s.amplitudes();
  for_each_block(regs, st, {}, kpos, [&](std::size_t base) {
    for (std::size_t t = 0; t < D; ++t) m(t, e) = a[base + off[t]];
    ++e;
  });
  DensityState out;
  for (int p : kpos) out.registers.push_back(regs[p]);
  out.matrix = m * m.adjoint();
  return out;
}

DensityState partial_trace(const DensityState& rho,
                           const std::vector<std::string>& keep) {
  if (keep.empty())
    throw Error(ErrorCode::InvalidArgument, "partial trace keeps nothing");
  std::vector<int> kpos;
  std::set<std::string> seen;
  for (const auto& l : keep) {
    if (!seen.insert(l).second)
      throw Error(ErrorCode::DuplicateRegister, "register listed twice");
    kpos.push_back(rho.position(l));
  }
  const auto& regs = rho.registers;
  auto st = strides_of(regs);
  auto off = block_offsets(regs, st, kpos);
  const std::size_t D = off.size();
  std::vector<std::size_t> bases;
  for_each_block(regs, st, {}, kpos, [&](std::size_t b) { bases.push_back(b); });
  DensityState out;
  for (int p : kpos) out.registers.push_back(regs[p]);
  out.matrix = Matrix::Zero(D, D);
  for (auto b : bases)
    for (std::size_t i = 0; i < D; ++i)
      for (std::size_t j = 0; j < D; ++j)
        out.matrix(i, j) += rho.matrix(b + off[i], b + off[j]);
  return out;
}

DensityState to_density(const PureState& s) {
  DensityState out;
  out.registers = s.registers();
  out.matrix = s.amplitudes() * s.amplitudes().adjoint();
  return out;
}

PureState embed_pair_as_qudit(const PureState& s, const std::string& q1,
                              const std::string& q2, const std::string& new_label) {
  if (s.dim(q1) != 2 || s.dim(q2) != 2)
    throw Error(ErrorCode::DimensionMismatch, "embedding needs two qubits");
  PureState t = s;
  auto tpos = positions_of(t, {q1, q2});
  std::string label = new_label.empty() ? q1 : new_label;
  apply_rectangular(t, tpos, Matrix::Identity(4, 4), {{label, 4}});
  return t;
}

void rename_inplace(PureState& s, const std::string& from, const std::string& to) {
  int p = s.position(from);
  if (from == to) return;
  if (s.has(to))
    throw Error(ErrorCode::DuplicateRegister, "register '" + to + "' exists");
  auto regs = s.registers();
  regs[p].label = to;
  Vector a = s.amplitudes();
  s.reset(std::move(regs), std::move(a));
}

PureState reorder(const PureState& s, const std::vector<std::string>& order) {
  if (order.size() != s.registers().size())
    throw Error(ErrorCode::InvalidArgument, "reorder needs every register");
  auto pos = positions_of(s, order);
  std::vector<RegisterId> nregs;
  for (int p : pos) nregs.push_back(s.registers()[p]);
  auto nst = strides_of(nregs);
  // stride in the new layout for each old position
  std::vector<std::size_t> map(s.registers().size());
  for (std::size_t i = 0; i < pos.size(); ++i) map[pos[i]] = nst[i];
  const auto& regs = s.registers();
  Vector out(s.amplitudes().size());
  std::vector<int> digit(regs.size(), 0);
  std::size_t nidx = 0;
  for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) {
    out[static_cast<Eigen::Index>(nidx)] = s.amplitudes()[i];
    for (int k = static_cast<int>(regs.size()) - 1; k >= 0; --k) {
      if (++digit[k] < regs[k].dim) {
        nidx += map[k];
        break;
      }
      nidx -= static_cast<std::size_t>(regs[k].dim - 1) * map[k];
      digit[k] = 0;
    }
  }
  PureState t;
  t.reset(std::move(nregs), std::move(out));
  return t;
}

Vector slice(const PureState& s, const std::string& label, int level) {
  int p = s.position(label);
  if (level < 0 || level >= s.registers()[p].dim)
    throw Error(ErrorCode::IndexOutOfRange, "slice level out of range");
  auto st = strides_of(s.registers());
  Vector out(static_cast<Eigen::Index>(s.size() / s.registers()[p].dim));
  Eigen::Index i = 0;
  for_each_block(s.registers(), st, {{p, level}}, {},
                 [&](std::size_t b) { out[i++] = s.amplitudes()[b]; });
  return out;
}

double projection_probability(const PureState& s,
                              const std::vector<std::string>& targets,
                              const Vector& v) {
  auto tpos = positions_of(s, targets);
  if (static_cast<std::size_t>(v.size()) != joint_dim(s, tpos))
    throw Error(ErrorCode::DimensionMismatch, "projection vector size mismatch");
  Matrix row = v.adjoint() / v.norm();
  return kraus_norms(s, tpos, {row}, {})[0] / s.amplitudes().squaredNorm();
}

cplx inner(const PureState& a, const PureState& b) {
  if (a.registers().size() != b.registers().size())
    throw Error(ErrorCode::InvalidArgument, "register sets differ");
  PureState bb = reorder(b, a.labels());
  if (bb.registers() != a.registers())
    throw Error(ErrorCode::DimensionMismatch, "register dims differ");
  return a.amplitudes().dot(bb.amplitudes());
}

// ---- gates ----------------------------------------------------------------------

namespace gates {

static cplx omega(int d, long k) {
  double ang = 2.0 * std::numbers::pi * static_cast<double>(k % d) / d;
  return std::polar(1.0, ang);
}

Matrix identity(int d) { return Matrix::Identity(d, d); }

Matrix x(int d) {
  Matrix m = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) m((j + 1) % d, j) = 1.0;
  return m;
}

Matrix z(int d) {
  Matrix m = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) m(j, j) = omega(d, j);
  return m;
}

Matrix y() {
  Matrix m(2, 2);
  m << 0.0, cplx(0, -1), cplx(0, 1), 0.0;
  return m;
}

Matrix h() {
  Matrix m(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  m << r, r, r, -r;
  return m;
}

Matrix s() {
  Matrix m = Matrix::Identity(2, 2);
  m(1, 1) = cplx(0, 1);
  return m;
}

Matrix fourier(int d) {
  Matrix m(d, d);
  const double r = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) m(j, k) = r * omega(d, static_cast<long>(j) * k);
  return m;
}

Matrix hadamard_qubits(int q) {
  Matrix m = Matrix::Identity(1, 1);
  for (int i = 0; i < q; ++i) m = kron(m, h());
  return m;
}

Matrix cz() {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return m;
}

Matrix cnot() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

Matrix swap(int d) {
  Matrix m = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(j * d + i, i * d + j) = 1.0;
  return m;
}

Matrix power(const Matrix& m, int k) {
  Matrix r = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) r = r * m;
  return r;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

Matrix kron_all(const std::vector<Matrix>& ms) {
  Matrix r = Matrix::Identity(1, 1);
  for (const auto& m : ms) r = kron(r, m);
  return r;
}

Matrix level_phase(int d, int level, cplx phase) {
  Matrix m = Matrix::Identity(d, d);
  m(level, level) = phase;
  return m;
}

// Completes v to an orthonormal basis with v as first column.
static Matrix complete_basis(const Vector& v) {
  const Eigen::Index d = v.size();
  Matrix b(d, d);
  b.col(0) = v / v.norm();
  Eigen::Index filled = 1;
  for (Eigen::Index e = 0; e < d && filled < d; ++e) {
    Vector c = Vector::Zero(d);
    c[e] = 1.0;
    for (Eigen::Index j = 0; j < filled; ++j)
      c -= b.col(j).dot(c) * b.col(j);
    double n = c.norm();
    if (n < 1e-8) continue;
    b.col(filled++) = c / n;
  }
  return b;
}

Matrix mapping(const Vector& from, const Vector& to) {
  if (from.size() != to.size())
    throw Error(ErrorCode::DimensionMismatch, "mapping between unequal dims");
  return complete_basis(to) * complete_basis(from).adjoint();
}

Vector basis_vector(int d, int k) {
  Vector v = Vector::Zero(d);
  v[k] = 1.0;
  return v;
}

Vector plus(int d) {
  return Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
}

Vector bell_vector(int d, int a, int b) {
  Vector phi = Vector::Zero(d * d);
  for (int j = 0; j < d; ++j) phi[j * d + j] = 1.0 / std::sqrt(double(d));
  Matrix op = kron(power(z(d), a) * power(x(d), b), identity(d));
  return op * phi;
}

static double gauss(Rng& rng) {
  // Box-Muller keeps the stream layout independent of the library.
  double u1 = rng.uniform();
  double u2 = rng.uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Matrix haar_unitary(int d, Rng& rng) {
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = cplx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    cplx ph = r(i, i) / std::abs(r(i, i));
    q.col(i) *= ph;
  }
  return q;
}

Vector haar_state(int d, Rng& rng) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = cplx(gauss(rng), gauss(rng));
  return v / v.norm();
}

}  // namespace gates

}  // namespace qnetsup
