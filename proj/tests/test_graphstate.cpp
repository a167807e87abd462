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
#include "qnetsup/graphstate.hpp"

using namespace qnetsup;
using namespace th;

namespace {
const double r2 = 1.0 / std::sqrt(2.0);

std::vector<std::string> names(int n, const std::string& p = "v") {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(p + std::to_string(i));
  return out;
}

Graph random_graph(const std::vector<std::string>& labels, double p, Rng& rng) {
  Graph g;
  for (const auto& l : labels) g.add_vertex(l);
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (rng.uniform() < p) g.add_edge(labels[i], labels[j]);
  return g;
}

std::vector<std::pair<int, int>> edge_index(const Graph& g, const std::vector<std::string>& order) {
  std::vector<std::pair<int, int>> e;
  auto pos = [&](const std::string& l) {
    return static_cast<int>(std::find(order.begin(), order.end(), l) - order.begin());
  };
  for (const auto& [a, b] : g.edges()) e.emplace_back(pos(a), pos(b));
  return e;
}
}  // namespace

TEST_CASE("prepare_graph_state examples") {
  Graph g;
  g.add_vertex("a");
  g.add_vertex("b");
  auto h = prepare_graph_state(g);
  CHECK(fid(h.state, qubits({"a", "b"}), oracle::ket({2, 2}, {{"00", .5}, {"01", .5}, {"10", .5}, {"11", .5}})) ==
        doctest::Approx(1.0));
  g.add_edge("a", "b");
  auto e = prepare_graph_state(g);
  // (|0+> + |1->)/sqrt2
  CHECK(fid(e.state, qubits({"a", "b"}),
            oracle::ket({2, 2}, {{"00", .5}, {"01", .5}, {"10", .5}, {"11", -.5}})) ==
        doctest::Approx(1.0));
  // star on 4 is LU-equal to GHZ4 by H on leaves
  auto star = prepare_graph_state(star_graph({"c", "l1", "l2", "l3"}));
  PureState t = star.state;
  for (const auto& l : {"l1", "l2", "l3"}) apply_unitary_inplace(t, {l}, gates::h());
  CHECK(fid(t, qubits({"c", "l1", "l2", "l3"}),
            oracle::ket({2, 2, 2, 2}, {{"0000", r2}, {"1111", r2}})) == doctest::Approx(1.0));
  Graph bad;
  bad.add_vertex("a");
  CHECK_THROWS(bad.add_edge("a", "a"));
  CHECK_THROWS(bad.add_edge("a", "zz"));
}

TEST_CASE("stabilizer_check examples") {
  auto h = prepare_graph_state(path_graph({"a", "b", "c"}));
  CHECK(stabilizer_check(h));
  PureState flipped = apply_unitary(h.state, {"b"}, gates::z());
  CHECK_FALSE(stabilizer_check(h.graph, flipped));
  PureState ghz(qubits({"a", "b", "c"}), oracle::ket({2, 2, 2}, {{"000", r2}, {"111", r2}}));
  ghz = apply_unitary(ghz, {"b"}, gates::h());
  ghz = apply_unitary(ghz, {"c"}, gates::h());
  CHECK(stabilizer_check(star_graph({"a", "b", "c"}), ghz));
}

TEST_CASE("cut_vertex examples") {
  Graph g = path_graph({"a", "b"});
  auto h = prepare_graph_state(g);
  auto r = cut_vertex(h, "b", PostSelect{0});
  CHECK(fid(r.handle.state, {{"a", 2}}, gates::plus()) == doctest::Approx(1.0));
  CHECK(r.handle.graph.vertices().size() == 1);

  auto star = prepare_graph_state(star_graph({"c", "x", "y"}));
  auto rc = cut_vertex(star, "c", PostSelect{0});
  CHECK(fid(rc.handle.state, qubits({"x", "y"}), oracle::kron(gates::plus(), gates::plus())) ==
        doctest::Approx(1.0));
  CHECK(rc.handle.graph.edges().empty());

  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto labels = names(5);
    Graph rg = random_graph(labels, 0.5, rng);
    auto hh = prepare_graph_state(rg);
    const std::string a = labels[trial % 5];
    auto r0 = cut_vertex(hh, a, PostSelect{0});
    auto r1 = cut_vertex(hh, a, PostSelect{1});
    CHECK(std::abs(std::abs(inner(r0.handle.state, r1.handle.state)) - 1.0) < 1e-10);
    CHECK(stabilizer_check(r1.handle));
  }
  CHECK_THROWS(cut_vertex(h, "nope", PostSelect{0}));
}

TEST_CASE("merge_vertices examples") {
  auto e1 = prepare_graph_state(path_graph({"p", "a1"}));
  auto e2 = prepare_graph_state(path_graph({"a2", "q"}));
  for (int k = 0; k < 2; ++k) {
    auto r = merge_vertices(e1, e2, "a1", "a2", PostSelect{k});
    CHECK(r.record.probability == doctest::Approx(0.5));
    std::vector<std::string> order{"p", "a1", "q"};
    CHECK(fid(r.handle.state, qubits(order), graph_ket(3, {{0, 1}, {1, 2}})) ==
          doctest::Approx(1.0));
    CHECK(r.handle.graph.has_edge("p", "a1"));
    CHECK(r.handle.graph.has_edge("a1", "q"));
  }

  // merging with an isolated |+> keeps the graph
  Graph iso;
  iso.add_vertex("z");
  auto hz = prepare_graph_state(iso);
  auto star = prepare_graph_state(star_graph({"c", "x", "y"}));
  for (int k = 0; k < 2; ++k) {
    auto r = merge_vertices(star, hz, "x", "z", PostSelect{k});
    CHECK(fid(r.handle.state, qubits({"c", "x", "y"}), graph_ket(3, {{0, 1}, {0, 2}})) ==
          doctest::Approx(1.0));
  }

  // two 3-star centres -> 5-star
  auto s1 = prepare_graph_state(star_graph({"c1", "x1", "y1"}));
  auto s2 = prepare_graph_state(star_graph({"c2", "x2", "y2"}));
  for (int k = 0; k < 2; ++k) {
    auto r = merge_vertices(s1, s2, "c1", "c2", PostSelect{k});
    CHECK(fid(r.handle.state, qubits({"c1", "x1", "y1", "x2", "y2"}),
              graph_ket(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}})) == doctest::Approx(1.0));
  }
  CHECK_THROWS(merge_vertices(s1, s1, "c1", "x1", PostSelect{0}));
}

TEST_CASE("ghz_state examples") {
  CHECK(fid(ghz_state(2, 2), qubits({"q0", "q1"}), gates::bell_vector(2, 0, 0)) ==
        doctest::Approx(1.0));
  CHECK(fid(ghz_state(3, 2), qubits({"q0", "q1", "q2"}),
            oracle::ket({2, 2, 2}, {{"000", r2}, {"111", r2}})) == doctest::Approx(1.0));
  auto g = ghz_state(5, 4);
  CHECK(g.size() == 1024);
  CHECK(fid(g, {{"q0", 4}, {"q1", 4}, {"q2", 4}, {"q3", 4}, {"q4", 4}},
            oracle::ket({4, 4, 4, 4, 4},
                        {{"00000", .5}, {"11111", .5}, {"22222", .5}, {"33333", .5}})) ==
        doctest::Approx(1.0));
  CHECK_THROWS(ghz_state(1, 2));
}

TEST_CASE("property: prepare/check round trip over all small graphs") {
  // exhaustive up to 4 vertices, sampled beyond
  for (int n = 1; n <= 4; ++n) {
    auto labels = names(n);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    for (int mask = 0; mask < (1 << pairs.size()); ++mask) {
      Graph g;
      for (const auto& l : labels) g.add_vertex(l);
      for (std::size_t e = 0; e < pairs.size(); ++e)
        if ((mask >> e) & 1) g.add_edge(labels[pairs[e].first], labels[pairs[e].second]);
      auto h = prepare_graph_state(g);
      CHECK(stabilizer_check(h));
      CHECK(fid(h.state, qubits(labels), graph_ket(n, edge_index(g, labels))) ==
            doctest::Approx(1.0));
    }
  }
  // 5 and 6 vertices: exhaustive, one aggregated assertion each
  for (int n = 5; n <= 6; ++n) {
    auto labels = names(n);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    int bad = 0;
    for (int mask = 0; mask < (1 << pairs.size()); ++mask) {
      Graph g;
      for (const auto& l : labels) g.add_vertex(l);
      for (std::size_t e = 0; e < pairs.size(); ++e)
        if ((mask >> e) & 1) g.add_edge(labels[pairs[e].first], labels[pairs[e].second]);
      if (!stabilizer_check(prepare_graph_state(g))) ++bad;
    }
    CHECK(bad == 0);
  }
  Rng rng(17);
  int bad = 0;
  for (int t = 0; t < 200; ++t) {
    auto labels = names(6);
    if (!stabilizer_check(prepare_graph_state(random_graph(labels, 0.5, rng)))) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("property: merge then cut reproduces the disjoint union") {
  Rng rng(23);
  for (int t = 0; t < 20; ++t) {
    auto la = names(4, "a"), lb = names(4, "b");
    Graph ga = random_graph(la, 0.5, rng), gb = random_graph(lb, 0.5, rng);
    auto ha = prepare_graph_state(ga), hb = prepare_graph_state(gb);
    auto m = merge_vertices(ha, hb, "a0", "b0", PostSelect{static_cast<int>(t % 2)});
    auto c = cut_vertex(m.handle, "a0", PostSelect{static_cast<int>((t / 2) % 2)});
    // reference: cut a0 from ga and b0 from gb independently
    auto ca = cut_vertex(ha, "a0", PostSelect{0}).handle;
    auto cb = cut_vertex(hb, "b0", PostSelect{0}).handle;
    PureState ref = tensor(ca.state, cb.state);
    CHECK(std::norm(inner(c.handle.state, ref)) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("property: Z-projection decomposition of |G>") {
  Rng rng(31);
  for (int t = 0; t < 10; ++t) {
    auto labels = names(5);
    Graph g = random_graph(labels, 0.6, rng);
    auto h = prepare_graph_state(g);
    for (const auto& a : labels) {
      Graph ga = g;
      auto nb = g.neighbors(a);
      ga.remove_vertex(a);
      PureState ref0 = graph_state_vector(ga);
      std::vector<std::string> rest;
      for (const auto& l : labels)
        if (l != a) rest.push_back(l);
      PureState s0(qubits(rest), oracle::normalized(slice(h.state, a, 0)));
      PureState s1(qubits(rest), oracle::normalized(slice(h.state, a, 1)));
      CHECK(std::norm(inner(s0, ref0)) == doctest::Approx(1.0));
      PureState ref1 = ref0;
      apply_z_all(ref1, nb);
      CHECK(std::norm(inner(s1, ref1)) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("property: GHZ to star bridge") {
  for (int n = 2; n <= 8; ++n) {
    auto labels = names(n, "q");
    PureState g = ghz_state(n, 2);
    for (int i = 1; i < n; ++i) apply_unitary_inplace(g, {labels[i]}, gates::h());
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i < n; ++i) e.emplace_back(0, i);
    CHECK(fid(g, qubits(labels), graph_ket(n, e)) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("graph JSON round trip") {
  Graph g = Graph::from_json_text(
      R"({"vertices":[{"label":"a","dim":2},{"label":"b","dim":2}],"edges":[["a","b"]]})");
  CHECK(g.has_edge("a", "b"));
  Graph h = Graph::from_json_text(g.to_json_text());
  CHECK(h.has_edge("b", "a"));
  CHECK_THROWS(Graph::from_json_text("{"));
  CHECK_THROWS(Graph::from_json_text(R"({"vertices":[{"label":"a"}],"edges":[["a","x"]]})"));
}
