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

#include "qnetsup/ctrltask.hpp"

#include <cmath>
#include <sstream>

namespace qnetsup {

namespace {

void require_state(const PureState& s, const std::vector<std::string>& regs,
                   const Vector& v, const char* what) {
  double p = projection_probability(s, regs, v);
  if (p < 1.0 - kWeightTol) {
    std::ostringstream os;
    os << what << " (overlap probability " << p << ")";
    throw Error(ErrorCode::PreconditionFailed, os.str());
  }
}

void check_basis(const std::vector<Vector>& basis, int d) {
  if (static_cast<int>(basis.size()) != d)
    throw Error(ErrorCode::IncompleteMeasurement, "basis size != dimension");
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].size() != d)
      throw Error(ErrorCode::DimensionMismatch, "basis vector dimension");
    for (std::size_t j = 0; j < basis.size(); ++j) {
      cplx g = basis[i].dot(basis[j]);
      cplx want = i == j ? 1.0 : 0.0;
      if (std::abs(g - want) > kAlgebraTol)
        throw Error(ErrorCode::IncompleteMeasurement, "basis not orthonormal");
    }
  }
}

std::vector<Matrix> bell_rows() {
  std::vector<Matrix> rows;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) rows.push_back(gates::bell_vector(2, a, b).adjoint());
  return rows;
}

}  // namespace

void check_weight_preservation(const PureState& s, const std::string& control,
                               const std::vector<std::string>& targets,
                               const std::vector<Matrix>& kraus, double tol) {
  auto by = outcome_probabilities_by_level(s, control, targets, kraus);
  const std::vector<double>* ref = nullptr;
  int ref_level = -1;
  for (std::size_t l = 0; l < by.size(); ++l) {
    if (by[l].empty()) continue;
    if (!ref) {
      ref = &by[l];
      ref_level = static_cast<int>(l);
      continue;
    }
    for (std::size_t k = 0; k < by[l].size(); ++k) {
      double diff = std::abs(by[l][k] - (*ref)[k]);
      if (diff > tol) {
        std::ostringstream os;
        os << "weight drift: outcome " << k << " has probability " << (*ref)[k]
           << " on control level " << ref_level << " but " << by[l][k]
           << " on level " << l;
        throw Error(ErrorCode::WeightDrift, os.str());
      }
    }
  }
}

Vector aux_vector_for_measurement(const Matrix& rho_a,
                                  const std::vector<Vector>& basis) {
  check_basis(basis, static_cast<int>(rho_a.rows()));
  Vector phi = Vector::Zero(rho_a.rows());
  for (const auto& v : basis) {
    double p = std::real(v.dot(rho_a * v));
    phi += std::sqrt(std::max(0.0, p)) * v;
  }
  return phi / phi.norm();
}

PureState prepare_aux_for_measurement(const DensityState& rho_a,
                                      const std::vector<Vector>& basis,
                                      const std::string& aux_label) {
  if (rho_a.registers.size() != 1)
    throw Error(ErrorCode::InvalidArgument, "reduced state must be one register");
  Vector phi = aux_vector_for_measurement(rho_a.matrix, basis);
  return PureState({{aux_label, rho_a.registers[0].dim}}, phi);
}

MeasurementRecord controlled_measure(PureState& state,
                                     const ControlledMeasureSpec& spec,
                                     const Policy& policy) {
  int d = state.dim(spec.target);
  if (state.dim(spec.aux) != d)
    throw Error(ErrorCode::DimensionMismatch, "aux dim != target dim");
  check_basis(spec.basis, d);
  std::vector<Matrix> proj;
  for (const auto& v : spec.basis) proj.push_back(v * v.adjoint());

  PureState t = state;
  fredkin_inplace(t, spec.control, spec.target, spec.aux, spec.active_level);
  check_weight_preservation(t, spec.control, {spec.aux}, proj);
  auto o = measure_inplace(t, {spec.aux}, proj, policy);
  if (spec.dummy) {
    Matrix v = gates::mapping(*spec.dummy, spec.basis[o.outcome]);
    apply_controlled_inplace(t, spec.control, spec.active_level, {spec.target}, v);
  }
  state = std::move(t);
  return {o.outcome, o.probability, state};
}

MeasurementRecord controlled_send_routes(PureState& state,
                                         const std::string& control,
                                         const std::string& a1,
                                         const std::string& ax1,
                                         const std::string& ax2,
                                         const std::vector<SendRoute>& routes,
                                         const Policy& policy) {
  for (const auto& l : {a1, ax1, ax2})
    if (state.dim(l) != 2)
      throw Error(ErrorCode::DimensionMismatch, "controlled send is qubit-only");
  require_state(state, {ax1}, gates::basis_vector(2, 0), "ax1 is not |0>");
  require_state(state, {ax2}, gates::plus(2), "ax2 is not |+>");
  const int cd = state.dim(control);
  for (const auto& r : routes) {
    if (r.level < 0 || r.level >= cd)
      throw Error(ErrorCode::IndexOutOfRange, "route level out of range");
    require_state(state, {r.a2, r.b}, gates::bell_vector(2, 0, 0),
                  "resource pair is not |Phi+>");
  }
  PureState t = state;
  for (const auto& r : routes) {
    fredkin_inplace(t, control, a1, ax1, r.level);
    fredkin_inplace(t, control, r.a2, ax2, r.level);
  }
  check_weight_preservation(t, control, {ax1, ax2}, bell_rows());
  auto o = bell_measure_inplace(t, ax1, ax2, policy);
  const int i = o.outcome >> 1, j = o.outcome & 1;
  // receiver undoes X^j Z^i; sender compensates on the idle branches
  Matrix c = gates::power(gates::z(), i) * gates::power(gates::x(), j);
  Matrix comp = c.transpose().inverse();
  for (const auto& r : routes) {
    apply_unitary_inplace(t, {r.b}, c);
    for (int lvl = 0; lvl < cd; ++lvl)
      if (lvl != r.level) apply_controlled_inplace(t, control, lvl, {r.a2}, comp);
  }
  state = std::move(t);
  return {o.outcome, o.probability, state};
}

MeasurementRecord controlled_send(PureState& state, const std::string& control,
                                  const std::string& a1, const std::string& a2,
                                  const std::string& b, const std::string& ax1,
                                  const std::string& ax2, const Policy& policy) {
  return controlled_send_routes(state, control, a1, ax1, ax2, {{1, a2, b}},
                                policy);
}

MeasurementRecord controlled_cut(PureState& state, const Graph& g,
                                 const std::string& control, const std::string& a,
                                 const std::string& aux, const Policy& policy) {
  if (!g.has_vertex(a))
    throw Error(ErrorCode::UnknownRegister, "vertex '" + a + "' absent");
  require_state(state, {aux}, gates::plus(2), "aux is not |+>");
  PureState t = state;
  fredkin_inplace(t, control, a, aux, 1);
  std::vector<Matrix> z{gates::basis_vector(2, 0).adjoint(),
                        gates::basis_vector(2, 1).adjoint()};
  check_weight_preservation(t, control, {aux}, z);
  auto o = z_measure_inplace(t, aux, policy);
  if (o.outcome == 1)
    for (const auto& v : g.neighbors(a))
      apply_controlled_inplace(t, control, 1, {v}, gates::z());
  state = std::move(t);
  return {o.outcome, o.probability, state};
}

MeasurementRecord controlled_merge(PureState& state, const std::string& control,
                                   const Graph& g, const std::string& a1,
                                   const std::string& a2, const std::string& aux,
                                   const Policy& policy) {
  if (state.dim(a1) != 2 || state.dim(a2) != 2)
    throw Error(ErrorCode::DimensionMismatch, "merged vertices must be qubits");
  require_state(state, {aux}, gates::plus(2), "aux is not |+>");
  const auto n2 = g.neighbors(a2);
  PureState t = state;
  fredkin_inplace(t, control, a2, aux, 0);
  auto ops = merging_operators();
  check_weight_preservation(t, control, {a1, a2}, ops);
  auto o = measure_inplace(t, {a1, a2}, ops, policy, {{a1, 2}});
  if (o.outcome == 1)
    for (int lvl = 1; lvl < t.dim(control); ++lvl)
      for (const auto& v : n2)
        apply_controlled_inplace(t, control, lvl, {v}, gates::z());
  rename_inplace(t, aux, a2);
  state = std::move(t);
  return {o.outcome, o.probability, state};
}

void apply_extra_level(PureState& state, const std::string& control,
                       int control_level, const std::string& target) {
  const int d = state.dim(target);
  if (d < 4) throw Error(ErrorCode::DimensionMismatch, "extra level needs dim >= 4");
  std::vector<Matrix> proj;
  for (int k = 0; k < d; ++k) {
    Vector e = gates::basis_vector(d, k);
    proj.push_back(e * e.adjoint());
  }
  auto by = outcome_probabilities_by_level(state, control, {target}, proj);
  if (control_level < 0 || control_level >= static_cast<int>(by.size()))
    throw Error(ErrorCode::IndexOutOfRange, "control level out of range");
  const auto& p = by[control_level];
  if (!p.empty()) {
    double high = 0;
    for (int k = 2; k < d; ++k) high += p[k];
    if (high > 1e-18)
      throw Error(ErrorCode::PreconditionFailed,
                  "target populated above level 1 in the active branch");
  }
  apply_controlled_inplace(state, control, control_level, {target},
                           gates::power(gates::x(d), 2));
}

NonlinearityReport demonstrate_measurement_nonlinearity() {
  const double r = 1.0 / std::sqrt(2.0);
  Vector k0 = gates::basis_vector(2, 0), k1 = gates::basis_vector(2, 1);
  Vector kp = (k0 + k1) * r, km = (k0 - k1) * r;
  auto pair = [&](const Vector& t0, const Vector& t1, double sign) {
    Vector v = r * (gates::kron(k0, t0) + sign * gates::kron(k1, t1));
    return v;
  };
  auto with_m = [&](const Vector& ct, int m) {
    Vector v = gates::kron(ct, gates::basis_vector(2, m));
    return Matrix(v * v.adjoint());
  };
  Matrix zx = 0.5 * with_m(pair(k0, k0, 1), 0) + 0.5 * with_m(pair(k1, k1, 1), 1);
  Matrix pm = 0.25 * (with_m(pair(kp, k0, 1), 0) + with_m(pair(kp, k1, 1), 1) +
                      with_m(pair(km, k0, 1), 0) + with_m(pair(km, k1, -1), 1));
  std::vector<RegisterId> regs{{"c", 2}, {"t", 2}, {"M", 2}};
  NonlinearityReport rep{{regs, zx}, {regs, pm}, 0.0};
  Eigen::SelfAdjointEigenSolver<Matrix> es(zx - pm);
  rep.trace_distance = 0.5 * es.eigenvalues().cwiseAbs().sum();
  return rep;
}

}  // namespace qnetsup
