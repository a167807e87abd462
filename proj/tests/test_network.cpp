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

#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "qnetsup/ctrltask.hpp"
#include "qnetsup/entmetrics.hpp"
#include "qnetsup/network.hpp"

using namespace qnetsup;
using namespace th;

namespace {
const double r2 = 1.0 / std::sqrt(2.0);
const Vector e0 = gates::basis_vector(2, 0), e1 = gates::basis_vector(2, 1);

std::vector<std::string> ids(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("d" + std::to_string(i));
  return out;
}

std::vector<cplx> to_list(const Vector& v) {
  return std::vector<cplx>(v.data(), v.data() + v.size());
}

// sum_i a_i |i>^{(x) n} over n registers of dim m
Vector request_ket(const std::vector<cplx>& a, int n) {
  const int m = static_cast<int>(a.size());
  long D = 1;
  for (int j = 0; j < n; ++j) D *= m;
  Vector v = Vector::Zero(D);
  for (int i = 0; i < m; ++i) {
    long idx = 0;
    for (int j = 0; j < n; ++j) idx = idx * m + i;
    v[idx] = a[i];
  }
  return v;
}

std::vector<RegisterId> rq_regs(int n, int m) {
  std::vector<RegisterId> r;
  for (int j = 0; j < n; ++j) r.push_back({"d" + std::to_string(j) + ".rq", m});
  return r;
}

// every tuple in [0,m)^k
std::vector<std::vector<int>> tuples(int m, int k) {
  std::vector<std::vector<int>> out{{}};
  for (int j = 0; j < k; ++j) {
    std::vector<std::vector<int>> next;
    for (const auto& t : out)
      for (int x = 0; x < m; ++x) {
        auto u = t;
        u.push_back(x);
        next.push_back(u);
      }
    out = next;
  }
  return out;
}
}  // namespace

TEST_CASE("prepare_weight_state examples") {
  auto a = prepare_weight_state({1.0, 0.0});
  CHECK(fid(a, {{"w", 2}}, e0) == doctest::Approx(1.0));
  auto p = prepare_weight_state({r2, r2});
  CHECK(fid(p, {{"w", 2}}, gates::plus()) == doctest::Approx(1.0));
  auto q = prepare_weight_state({0.5, 0.5, 0.5, 0.5});
  CHECK(q.registers()[0].dim == 4);
  CHECK_THROWS(prepare_weight_state({1.0, 1.0}));
}

TEST_CASE("distribute_request examples") {
  {
    auto net = make_request_network(ids(2), 2, "d0");
    PolicySource src = PolicySource::fixed(0);
    auto r = distribute_request(net, prepare_weight_state({r2, r2}), src);
    CHECK(r.probability == doctest::Approx(0.25));
    CHECK(fid(net.global, rq_regs(2, 2), gates::bell_vector(2, 0, 0)) == doctest::Approx(1.0));
    CHECK(net.branches == 2);
    CHECK_FALSE(net.request_leg.has_value());
  }
  {
    auto net = make_request_network(ids(4), 4, "d0");
    PolicySource src = PolicySource::fixed(0);
    distribute_request(net, prepare_weight_state({0.5, 0.5, 0.5, 0.5}), src);
    CHECK(fid(net.global, rq_regs(4, 4), request_ket({0.5, 0.5, 0.5, 0.5}, 4)) ==
          doctest::Approx(1.0));
  }
  {
    auto net = make_request_network(ids(2), 2, "d0");
    PolicySource src = PolicySource::fixed(0);
    CHECK_THROWS(distribute_request(net, prepare_weight_state({0.5, 0.5, 0.5, 0.5}), src));
    auto net2 = make_request_network(ids(2), 2, "d0");
    net2.request_leg.reset();
    CHECK_THROWS(distribute_request(net2, prepare_weight_state({r2, r2}), src));
  }
}

TEST_CASE("oracle: distribute_request over every Bell outcome") {
  Rng rng(3);
  for (auto [m, n] : {std::pair{3, 3}, std::pair{2, 4}}) {
    auto alphas = to_list(gates::haar_state(m, rng));
    double worst = 1;
    double ptot = 0;
    for (int k = 0; k < m * m; ++k) {
      auto net = make_request_network(ids(n), m, "d0");
      PolicySource src = PolicySource::scripted({{0, k}});
      auto r = distribute_request(net, prepare_weight_state(alphas), src);
      CHECK(r.outcome == k);
      ptot += r.probability;
      CHECK(r.probability == doctest::Approx(1.0 / (m * m)));
      worst = std::min(worst, fid(net.global, rq_regs(n, m), request_ket(alphas, n)));
    }
    CHECK(ptot == doctest::Approx(1.0));
    CHECK(worst > 1 - 1e-10);
  }
}

TEST_CASE("oracle: collapse_to_single_control over every outcome tuple") {
  Rng rng(4);
  for (auto [m, n] : {std::pair{3, 3}, std::pair{2, 4}, std::pair{2, 3}}) {
    auto alphas = to_list(gates::haar_state(m, rng));
    Vector want(m);
    for (int i = 0; i < m; ++i) want[i] = alphas[i];
    double worst = 1;
    int cases = 0;
    for (int k = 0; k < m * m; ++k)
      for (const auto& tup : tuples(m, n - 1)) {
        std::map<int, int> script{{0, k}};
        for (int j = 0; j < n - 1; ++j) script[j + 1] = tup[j];
        auto net = make_request_network(ids(n), m, "d0");
        PolicySource src = PolicySource::scripted(script);
        distribute_request(net, prepare_weight_state(alphas), src);
        auto outs = collapse_to_single_control(net, "d0", src);
        CHECK(outs == tup);
        REQUIRE(net.global.registers().size() == 1);
        worst = std::min(worst, fid(net.global, {{"d0.rq", m}}, want));
        ++cases;
      }
    CHECK(cases == m * m * static_cast<int>(std::pow(m, n - 1)));
    CHECK(worst > 1 - 1e-10);
  }
}

TEST_CASE("collapse example: trivial outcomes need no correction") {
  auto net = make_request_network(ids(2), 2, "d0");
  PolicySource src = PolicySource::fixed(0);
  distribute_request(net, prepare_weight_state({r2, r2}), src);
  auto outs = collapse_to_single_control(net, "d0", src);
  CHECK(outs == std::vector<int>{0});
  CHECK(fid(net.global, {{"d0.rq", 2}}, gates::plus()) == doctest::Approx(1.0));
}

TEST_CASE("apply_branch_programs: single program runs plainly") {
  NetworkState net;
  Device d;
  d.id = "A";
  net.devices.push_back(d);
  net.initiator = "A";
  net.add_registers(PureState(qubits({"A.q"}), e0), {"A"});
  BranchProgram p{0, {step::unitary("A", {"A.q"}, gates::x())}};
  PolicySource src;
  auto run = apply_branch_programs(net, {p}, src);
  CHECK(fid(net.global, qubits({"A.q"}), e1) == doctest::Approx(1.0));
  CHECK(run.controlled_ops == 0);
}

TEST_CASE("apply_branch_programs: two branches on one Bell pair") {
  Rng rng(6);
  auto alphas = to_list(gates::haar_state(2, rng));
  auto net = make_request_network({"A", "B"}, 2, "A");
  PolicySource src = PolicySource::fixed(0);
  distribute_request(net, prepare_weight_state(alphas), src);
  net.add_registers(PureState(qubits({"A.p", "B.p"}), gates::bell_vector(2, 0, 0)), {"A", "B"});
  BranchProgram b0{0, {step::unitary("A", {"A.p"}, gates::identity(2)), step::unitary("B", {"B.p"}, gates::identity(2))}};
  BranchProgram b1{1, {step::unitary("A", {"A.p"}, gates::x()), step::unitary("B", {"B.p"}, gates::x())}};
  auto run = apply_branch_programs(net, {b0, b1}, src);
  CHECK(run.controlled_ops == 4);
  // direct: a0|00>|Phi+> + a1|11>(X(x)X)|Phi+>
  Vector xx = gates::kron(gates::x(), gates::x()) * gates::bell_vector(2, 0, 0);
  Vector want = alphas[0] * oracle::kron(oracle::ket({2, 2}, {{"00", 1}}), gates::bell_vector(2, 0, 0)) +
                alphas[1] * oracle::kron(oracle::ket({2, 2}, {{"11", 1}}), xx);
  CHECK(fid(net.global, qubits({"A.rq", "B.rq", "A.p", "B.p"}), want) == doctest::Approx(1.0));
}

TEST_CASE("property: branch programs factorize per branch") {
  Rng rng(7);
  for (auto [m, n] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}, std::pair{3, 3}}) {
    for (int trial = 0; trial < 3; ++trial) {
      auto alphas = to_list(gates::haar_state(m, rng));
      auto dev = ids(n);
      auto net = make_request_network(dev, m, "d0");
      PolicySource src = PolicySource::fixed(0);
      distribute_request(net, prepare_weight_state(alphas), src);
      std::vector<std::string> res;
      for (const auto& d : dev) res.push_back(d + ".r");
      Vector psi = gates::haar_state(1 << n, rng);
      net.add_registers(PureState(qubits(res), psi), dev);
      std::vector<std::vector<Matrix>> U(m, std::vector<Matrix>(n));
      std::vector<BranchProgram> progs;
      for (int i = 0; i < m; ++i) {
        BranchProgram p{i, {}};
        for (int j = 0; j < n; ++j) {
          U[i][j] = gates::haar_unitary(2, rng);
          p.steps.push_back(step::unitary(dev[j], {res[j]}, U[i][j]));
        }
        progs.push_back(p);
      }
      apply_branch_programs(net, progs, src);
      Vector want = Vector::Zero(static_cast<long>(std::pow(m, n)) << n);
      for (int i = 0; i < m; ++i) {
        Matrix big = U[i][0];
        for (int j = 1; j < n; ++j) big = gates::kron(big, U[i][j]);
        std::vector<cplx> sel(m, 0.0);
        sel[i] = alphas[i];
        want += oracle::kron(request_ket(sel, n), big * psi);
      }
      auto regs = rq_regs(n, m);
      for (const auto& r : res) regs.push_back({r, 2});
      CHECK(fid(net.global, regs, want) > 1 - 1e-9);
    }
  }
}

TEST_CASE("apply_branch_programs: weight-drift guard and ownership") {
  auto net = make_request_network({"A", "B"}, 2, "A");
  PolicySource src = PolicySource::fixed(0);
  distribute_request(net, prepare_weight_state({r2, r2}), src);
  net.add_registers(PureState(qubits({"A.q"}), e0), {"A"});
  NetworkState saved = net;
  // branch 1 flips the qubit, then both measure it: distributions differ
  BranchProgram b0{0, {step::noop(), step::measure_z("A", "m", "A.q")}};
  BranchProgram b1{1, {step::unitary("A", {"A.q"}, gates::x()), step::measure_z("A", "m", "A.q")}};
  try {
    apply_branch_programs(net, {b0, b1}, src);
    FAIL("expected WeightDrift");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WeightDrift);
  }
  // a device touching a register it does not own
  NetworkState n2 = saved;
  BranchProgram f0{0, {step::unitary("B", {"A.q"}, gates::x())}};
  BranchProgram f1{1, {step::unitary("B", {"A.q"}, gates::z())}};
  CHECK_THROWS_AS(apply_branch_programs(n2, {f0, f1}, src), Error);
  // measurements must agree across branches
  NetworkState n3 = saved;
  BranchProgram g0{0, {step::measure_z("A", "m", "A.q")}};
  BranchProgram g1{1, {step::measure_x("A", "m", "A.q")}};
  CHECK_THROWS_AS(apply_branch_programs(n3, {g0, g1}, src), Error);
  // a valid program with a shared measurement passes the guard
  NetworkState n4 = saved;
  BranchProgram h0{0, {step::unitary("A", {"A.q"}, gates::h()), step::measure_z("A", "m", "A.q")}};
  BranchProgram h1{1, {step::unitary("A", {"A.q"}, gates::h() * gates::z()), step::measure_z("A", "m", "A.q")}};
  auto run = apply_branch_programs(n4, {h0, h1}, src);
  CHECK(run.probabilities.at("m") == doctest::Approx(0.5));
}

TEST_CASE("detach_control: Smolin superposition with local corrections") {
  // single device holding the 4-level control and four qubits
  for (int k = 0; k < 4; ++k) {
    NetworkState net;
    Device d;
    d.id = "A";
    d.request_reg = "A.c";
    net.devices.push_back(d);
    net.initiator = "A";
    Vector v = Vector::Zero(4 * 16);
    for (int i = 0; i < 4; ++i) {
      Vector b = gates::bell_vector(2, i >> 1, i & 1);
      v += 0.5 * oracle::kron(gates::basis_vector(4, i), oracle::kron(b, b));
    }
    net.global = PureState({{"A.c", 4}, {"1", 2}, {"2", 2}, {"3", 2}, {"4", 2}}, v);
    net.device("A").resource_regs = {"1", "2", "3", "4"};
    net.branches = 4;
    DetachPlan plan;
    plan.basis = ControlBasis::HadamardQubits;
    Matrix xx = gates::kron(gates::x(), gates::x()), zz = gates::kron(gates::z(), gates::z());
    plan.table[1] = {{{"1", "2"}, zz}};
    plan.table[2] = {{{"1", "2"}, xx}};
    plan.table[3] = {{{"1", "2"}, xx * zz}};
    PolicySource src = PolicySource::scripted({{0, k}});
    auto r = detach_control(net, "A", plan, src);
    CHECK(r.probability == doctest::Approx(0.25));
    CHECK(r.max_overlap < 1e-12);
    Vector want = Vector::Zero(16);
    for (int i = 0; i < 4; ++i) {
      Vector b = gates::bell_vector(2, i >> 1, i & 1);
      want += 0.5 * oracle::kron(b, b);
    }
    CHECK(fid(net.global, qubits({"1", "2", "3", "4"}), want) == doctest::Approx(1.0));
  }
}

TEST_CASE("detach_control: extra-level markers give one state for every outcome") {
  Rng rng(8);
  for (int m : {2, 3, 4}) {
    Vector ref;
    for (int k = 0; k < m; ++k) {
      Rng local(100 + m);
      auto alphas = gates::haar_state(m, local);
      // branch i: marker register i at level 2, others at a random level <= 1
      NetworkState net;
      Device d;
      d.id = "A";
      d.request_reg = "A.c";
      net.devices.push_back(d);
      net.initiator = "A";
      std::vector<RegisterId> regs{{"A.c", m}};
      for (int j = 0; j < m; ++j) regs.push_back({"t" + std::to_string(j), 4});
      long D = m;
      for (int j = 0; j < m; ++j) D *= 4;
      Vector v = Vector::Zero(D);
      for (int i = 0; i < m; ++i) {
        Vector part = gates::basis_vector(m, i);
        for (int j = 0; j < m; ++j) part = oracle::kron(part, gates::basis_vector(4, j == i ? 2 : (i + j) % 2));
        v += alphas[i] * part;
      }
      net.global = PureState(regs, v);
      for (int j = 0; j < m; ++j) net.device("A").resource_regs.push_back("t" + std::to_string(j));
      net.branches = m;
      DetachPlan plan;
      for (int i = 0; i < m; ++i) plan.markers.push_back({"t" + std::to_string(i), 2});
      PolicySource src = PolicySource::scripted({{0, k}});
      detach_control(net, "A", plan, src);
      std::vector<RegisterId> out(regs.begin() + 1, regs.end());
      Vector want = Vector::Zero(D / m);
      for (int i = 0; i < m; ++i) {
        Vector part = Vector::Ones(1);
        for (int j = 0; j < m; ++j) part = oracle::kron(part, gates::basis_vector(4, j == i ? 2 : (i + j) % 2));
        want += alphas[i] * part;
      }
      CHECK(fid(net.global, out, want) > 1 - 1e-9);
      PureState now = reorder(net.global, net.global.labels());
      if (k == 0) ref = now.amplitudes();
      else CHECK(oracle::overlap2(ref, now.amplitudes()) > 1 - 1e-9);
    }
    (void)rng;
  }
}

TEST_CASE("detach_control refuses non-orthogonal constituents") {
  NetworkState net;
  Device d;
  d.id = "A";
  d.request_reg = "A.c";
  net.devices.push_back(d);
  net.initiator = "A";
  net.global = PureState(qubits({"A.c", "q"}),
                         oracle::normalized(oracle::kron(e0, e0) + oracle::kron(e1, gates::plus())));
  net.device("A").resource_regs = {"q"};
  net.branches = 2;
  PolicySource src;
  try {
    detach_control(net, "A", DetachPlan{}, src);
    FAIL("expected NotOrthogonal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotOrthogonal);
    CHECK(std::string(e.what()).find("0.707") != std::string::npos);
  }
}

TEST_CASE("toffoli operator is unitary and dormant off the diagonal") {
  for (int d = 2; d <= 5; ++d) {
    Matrix t = toffoli_operator(d);
    CHECK(is_unitary(t));
    for (int p = 0; p < d; ++p)
      for (int s = 0; s < d; ++s)
        for (int r = 0; r < d; ++r) {
          long in = (static_cast<long>(p) * d + s) * d + r;
          long out = (static_cast<long>(p) * d + s) * d + (p == s ? (r + s) % d : r);
          CHECK(std::abs(t(out, in) - 1.0) < 1e-12);
        }
  }
}

namespace {
NetworkState addressing_net(int d, const Vector& ad, const Vector& ac) {
  NetworkState net;
  Device dev;
  dev.id = "A";
  dev.addressing_reg = "A.ad";
  dev.activation_reg = "A.ac";
  dev.request_reg = "A.rq";
  net.devices.push_back(dev);
  net.initiator = "A";
  net.global = PureState({{"A.ad", d}, {"A.ac", d}, {"A.rq", d}},
                         oracle::kron(ad, oracle::kron(ac, gates::basis_vector(d, 0))));
  return net;
}
}  // namespace

TEST_CASE("addressing_activate examples") {
  auto net = addressing_net(4, gates::basis_vector(4, 3), gates::basis_vector(4, 3));
  addressing_activate(net, "A");
  CHECK(std::norm(net.global.amplitude({{"A.ad", 3}, {"A.ac", 3}, {"A.rq", 3}})) == doctest::Approx(1.0));
  auto dormant = addressing_net(4, gates::basis_vector(4, 1), gates::basis_vector(4, 2));
  addressing_activate(dormant, "A");
  CHECK(std::norm(dormant.global.amplitude({{"A.ad", 1}, {"A.ac", 2}, {"A.rq", 0}})) ==
        doctest::Approx(1.0));
  Vector sup = oracle::normalized(gates::basis_vector(4, 1) + gates::basis_vector(4, 2));
  auto s = addressing_net(4, gates::basis_vector(4, 1), sup);
  addressing_activate(s, "A");
  Vector want = r2 * oracle::kron(gates::basis_vector(4, 1),
                                  oracle::kron(gates::basis_vector(4, 1), gates::basis_vector(4, 1))) +
                r2 * oracle::kron(gates::basis_vector(4, 1),
                                  oracle::kron(gates::basis_vector(4, 2), gates::basis_vector(4, 0)));
  CHECK(fid(s.global, {{"A.ad", 4}, {"A.ac", 4}, {"A.rq", 4}}, want) == doctest::Approx(1.0));
  auto bad = addressing_net(2, e0, e0);
  bad.global = tensor(bad.global, PureState({{"x", 3}}, gates::basis_vector(3, 0)));
  bad.device("A").request_reg = "x";
  CHECK_THROWS(addressing_activate(bad, "A"));
}

TEST_CASE("program_gate examples") {
  auto mk = [&](const Vector& prog) {
    NetworkState net;
    Device d;
    d.id = "A";
    net.devices.push_back(d);
    net.initiator = "A";
    net.add_registers(PureState(qubits({"A.prog", "A.t"}), oracle::kron(prog, e0)), {"A", "A"});
    return net;
  };
  ProgramTable tab{{{0, gates::identity(2)}, {1, gates::x()}}};
  auto one = mk(e1);
  program_gate(one, "A", tab, "A.prog", {"A.t"});
  CHECK(fid(one.global, qubits({"A.prog", "A.t"}), oracle::kron(e1, e1)) == doctest::Approx(1.0));
  auto plus = mk(gates::plus());
  program_gate(plus, "A", tab, "A.prog", {"A.t"});
  CHECK(fid(plus.global, qubits({"A.prog", "A.t"}), gates::bell_vector(2, 0, 0)) ==
        doctest::Approx(1.0));
  CHECK(plus.global.has("A.prog"));
  auto missing = mk(gates::plus());
  CHECK_THROWS(program_gate(missing, "A", ProgramTable{{{0, gates::identity(2)}}}, "A.prog", {"A.t"}));
  auto fine = mk(e0);
  CHECK_NOTHROW(program_gate(fine, "A", ProgramTable{{{0, gates::identity(2)}}}, "A.prog", {"A.t"}));
}

TEST_CASE("activation-driven program equals the branch program") {
  // ad=|1>, ac=(|0>+|1>)/sqrt2, d=2; matched branch runs X on the resource
  auto build = [&] {
    auto net = addressing_net(2, e1, gates::plus());
    net.add_registers(PureState(qubits({"A.r"}), e0), {"A"});
    return net;
  };
  auto viatable = build();
  addressing_activate(viatable, "A");
  program_gate(viatable, "A", ProgramTable{{{0, gates::identity(2)}, {1, gates::x()}}}, "A.rq", {"A.r"});

  auto viabranch = build();
  addressing_activate(viabranch, "A");
  viabranch.branches = 2;
  BranchProgram p0{0, {step::unitary("A", {"A.r"}, gates::identity(2))}};
  BranchProgram p1{1, {step::unitary("A", {"A.r"}, gates::x())}};
  PolicySource src;
  apply_branch_programs(viabranch, {p0, p1}, src);
  CHECK(std::norm(inner(viatable.global, viabranch.global)) == doctest::Approx(1.0));
  Vector want = r2 * oracle::ket({2, 2, 2, 2}, {{"1000", 1}}) + r2 * oracle::ket({2, 2, 2, 2}, {{"1111", 1}});
  CHECK(fid(viatable.global, qubits({"A.ad", "A.ac", "A.rq", "A.r"}), want) == doctest::Approx(1.0));
}

TEST_CASE("load_topology parses and rejects") {
  const char* ok = R"({
    "devices": ["A", "B"], "initiator": "A", "resource": "bell_mesh",
    "branches": [
      {"branch": 0, "steps": [{"op": "noop"}]},
      {"branch": 1, "steps": [{"device": "B", "op": "unitary", "gate": "x", "targets": ["B.A"]}]}
    ],
    "checks": [{"name": "n", "kind": "negativity", "keep": ["A.B", "B.A"], "side_a": ["A.B"], "expected": 0.5}]
  })";
  auto tp = load_topology(ok);
  CHECK(tp.programs.size() == 2);
  CHECK(tp.net.global.has("A.B"));
  CHECK(tp.net.device("B").owns("B.A"));
  CHECK(tp.checks.size() == 1);
  auto code = [](const char* j) {
    try {
      load_topology(j);
    } catch (const Error& e) {
      return e.code();
    }
    return static_cast<ErrorCode>(0);
  };
  CHECK(code("{") == ErrorCode::Config);
  CHECK(code(R"({"devices": ["A"], "initiator": "Z", "branches": [{"branch":0,"steps":[]}]})") ==
        ErrorCode::Config);
  CHECK(code(R"({"devices": ["A"], "initiator": "A", "resource": "torus", "branches": [{"branch":0,"steps":[]}]})") ==
        ErrorCode::Config);
  CHECK(code(R"({"devices": ["A","B"], "initiator": "A", "branches": [{"branch":0,"steps":[{"op":"warp","device":"A"}]}]})") ==
        ErrorCode::Config);
}
