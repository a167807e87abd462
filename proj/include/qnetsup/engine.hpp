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

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace qnetsup {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kAlgebraTol = 1e-10;
inline constexpr double kPsdFloor = 1e-9;
inline constexpr double kZeroProbability = 1e-12;
inline constexpr std::size_t kMaxDimension = std::size_t{1} << 20;

enum class ErrorCode : int {
  InvalidArgument = 1,
  DuplicateRegister = 2,
  UnknownRegister = 3,
  IndexOutOfRange = 4,
  DimensionMismatch = 5,
  NotUnitary = 6,
  IncompleteMeasurement = 7,
  ZeroProbability = 8,
  WeightDrift = 9,
  NotOrthogonal = 10,
  PreconditionFailed = 11,
  Config = 12,
  SizeLimit = 13,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct RegisterId {
  std::string label;
  int dim = 2;
  bool operator==(const RegisterId&) const = default;
};

// mt19937_64 with a fixed double extraction so streams are bit reproducible
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 eng_;
};

struct PostSelect {
  int outcome = 0;
};
struct Sample {
  Rng* rng = nullptr;
  // Optional sink receiving the outcome distribution of every draw.
  std::vector<std::vector<double>>* log = nullptr;
};
using Policy = std::variant<PostSelect, Sample>;

class PureState {
 public:
  PureState() = default;
  PureState(std::vector<RegisterId> regs, Vector amps);

  const std::vector<RegisterId>& registers() const { return regs_; }
  const Vector& amplitudes() const { return amps_; }
  Vector& mutable_amplitudes() { return amps_; }
  std::size_t size() const { return static_cast<std::size_t>(amps_.size()); }

  bool has(const std::string& label) const;
  int position(const std::string& label) const;  // throws UnknownRegister
  int dim(const std::string& label) const;
  std::size_t stride(int pos) const;
  std::vector<std::string> labels() const;

  cplx amplitude(const std::map<std::string, int>& digits) const;
  double norm() const { return amps_.norm(); }

  // Internal rebinding used by the engine; does not renormalize.
  void reset(std::vector<RegisterId> regs, Vector amps);

 private:
  std::vector<RegisterId> regs_;
  Vector amps_;
};

struct DensityState {
  std::vector<RegisterId> registers;
  Matrix matrix;

  int position(const std::string& label) const;
  std::vector<std::string> labels() const;
};

struct Outcome {
  int outcome = 0;
  double probability = 0.0;
};

struct MeasurementRecord {
  int outcome = 0;
  double probability = 0.0;
  PureState post_state;
};

// ---- construction -------------------------------------------------------

PureState new_state(const std::vector<RegisterId>& specs,
                    const std::vector<int>& basis_index);
PureState from_amplitudes(const std::vector<RegisterId>& specs,
                          const Vector& amps);
PureState tensor(const PureState& a, const PureState& b);
void append(PureState& state, const PureState& other);

// ---- unitaries ------------------------------------------------------------

bool is_unitary(const Matrix& u, double tol = kAlgebraTol);

void apply_unitary_inplace(PureState& s, const std::vector<std::string>& targets,
                           const Matrix& u);
void apply_controlled_inplace(PureState& s, const std::string& control,
                              int active_level,
                              const std::vector<std::string>& targets,
                              const Matrix& u);
void apply_multi_controlled_inplace(
    PureState& s, const std::vector<std::pair<std::string, int>>& controls,
    const std::vector<std::string>& targets, const Matrix& u);
void fredkin_inplace(PureState& s, const std::string& control,
                     const std::string& a, const std::string& b,
                     int active_level = 1);

PureState apply_unitary(PureState s, const std::vector<std::string>& targets,
                        const Matrix& u);
PureState apply_controlled(PureState s, const std::string& control,
                           int active_level,
                           const std::vector<std::string>& targets,
                           const Matrix& u);
PureState fredkin(PureState s, const std::string& control,
                  const std::string& a, const std::string& b,
                  int active_level = 1);

// ---- measurement ------------------------------------------------------------

// Kraus operators act on `targets` (big-endian over the listed order). Square
// operators keep the targets; rectangular ones replace them by `outputs`,
// inserted where the first target used to sit. Row operators need no outputs.
std::vector<double> outcome_probabilities(const PureState& s,
                                          const std::vector<std::string>& targets,
                                          const std::vector<Matrix>& kraus);

// probs[level][k] for each control level with nonzero weight; rows of
// weightless levels are left empty.
std::vector<std::vector<double>> outcome_probabilities_by_level(
    const PureState& s, const std::string& control,
    const std::vector<std::string>& targets, const std::vector<Matrix>& kraus);

int sample_index(const std::vector<double>& probs, Rng& rng);

Outcome measure_inplace(PureState& s, const std::vector<std::string>& targets,
                        const std::vector<Matrix>& kraus, const Policy& policy,
                        const std::vector<RegisterId>& outputs = {});
MeasurementRecord measure(const PureState& s,
                          const std::vector<std::string>& targets,
                          const std::vector<Matrix>& kraus, const Policy& policy,
                          const std::vector<RegisterId>& outputs = {});

Outcome bell_measure_inplace(PureState& s, const std::string& q1,
                             const std::string& q2, const Policy& policy);
MeasurementRecord bell_measure(const PureState& s, const std::string& q1,
                               const std::string& q2, const Policy& policy);

Outcome generalized_x_measure_inplace(PureState& s, const std::string& target,
                                      const Policy& policy);
MeasurementRecord generalized_x_measure(const PureState& s,
                                        const std::string& target,
                                        const Policy& policy);

// Computational-basis measurement; the register is removed unless keep.
Outcome z_measure_inplace(PureState& s, const std::string& target,
                          const Policy& policy, bool keep = false);

// Projective measurement onto an orthonormal basis, register kept.
Outcome basis_measure_inplace(PureState& s, const std::string& target,
                              const std::vector<Vector>& basis,
                              const Policy& policy);

// ---- reduction and bookkeeping ---------------------------------------------

DensityState partial_trace(const PureState& s,
                           const std::vector<std::string>& keep);
DensityState partial_trace(const DensityState& rho,
                           const std::vector<std::string>& keep);
DensityState to_density(const PureState& s);

PureState embed_pair_as_qudit(const PureState& s, const std::string& q1,
                              const std::string& q2,
                              const std::string& new_label = "");
void rename_inplace(PureState& s, const std::string& from, const std::string& to);
PureState reorder(const PureState& s, const std::vector<std::string>& order);

// Amplitudes with `label` fixed to `level` and that register dropped.
Vector slice(const PureState& s, const std::string& label, int level);
// Probability of projecting `targets` onto the normalized vector v.
double projection_probability(const PureState& s,
                              const std::vector<std::string>& targets,
                              const Vector& v);
// <a|b> after aligning b's registers to a's order.
cplx inner(const PureState& a, const PureState& b);

// ---- gates ------------------------------------------------------------------

namespace gates {
Matrix identity(int d);
Matrix x(int d = 2);  // X|j> = |j+1 mod d>
Matrix z(int d = 2);  // Z|j> = w^j |j>
Matrix y();
Matrix h();
Matrix s();
Matrix fourier(int d);  // column k is |x_k> = d^{-1/2} sum_j w^{jk}|j>
Matrix hadamard_qubits(int q);
Matrix cz();
Matrix cnot();
Matrix swap(int d);
Matrix power(const Matrix& m, int k);
Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron_all(const std::vector<Matrix>& ms);
Matrix level_phase(int d, int level, cplx phase);
// Unitary sending `from` to `to` (both normalized).
Matrix mapping(const Vector& from, const Vector& to);
Vector bell_vector(int d, int a, int b);  // (Z^a X^b (x) 1)|Phi+_d>
Vector basis_vector(int d, int k);
Vector plus(int d = 2);
Matrix haar_unitary(int d, Rng& rng);
Vector haar_state(int d, Rng& rng);
}  // namespace gates

}  // namespace qnetsup
