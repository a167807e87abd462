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

#include "qnetsup/graphstate.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace qnetsup {

namespace {
std::pair<std::string, std::string> key(const std::string& a,
                                        const std::string& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}
}  // namespace

void Graph::add_vertex(const RegisterId& v) {
  if (has_vertex(v.label))
    throw Error(ErrorCode::DuplicateRegister, "vertex '" + v.label + "' exists");
  if (v.dim < 2)
    throw Error(ErrorCode::InvalidArgument, "vertex dim < 2");
  vertices_.push_back(v);
}

void Graph::add_edge(const std::string& a, const std::string& b) {
  if (a == b) throw Error(ErrorCode::InvalidArgument, "self loop on '" + a + "'");
  if (!has_vertex(a) || !has_vertex(b))
    throw Error(ErrorCode::UnknownRegister, "edge references missing vertex");
  edges_.insert(key(a, b));
}

void Graph::remove_edge(const std::string& a, const std::string& b) {
  edges_.erase(key(a, b));
}

void Graph::toggle_edge(const std::string& a, const std::string& b) {
  if (has_edge(a, b))
    remove_edge(a, b);
  else
    add_edge(a, b);
}

void Graph::isolate(const std::string& v) {
  for (auto it = edges_.begin(); it != edges_.end();) {
    if (it->first == v || it->second == v)
      it = edges_.erase(it);
    else
      ++it;
  }
}

void Graph::remove_vertex(const std::string& v) {
  if (!has_vertex(v))
    throw Error(ErrorCode::UnknownRegister, "vertex '" + v + "' absent");
  isolate(v);
  vertices_.erase(std::remove_if(vertices_.begin(), vertices_.end(),
                                 [&](const RegisterId& r) { return r.label == v; }),
                  vertices_.end());
}

void Graph::rename(const std::string& from, const std::string& to) {
  if (from == to) return;
  if (has_vertex(to))
    throw Error(ErrorCode::DuplicateRegister, "vertex '" + to + "' exists");
  bool found = false;
  for (auto& r : vertices_)
    if (r.label == from) {
      r.label = to;
      found = true;
    }
  if (!found) throw Error(ErrorCode::UnknownRegister, "vertex '" + from + "' absent");
  std::set<std::pair<std::string, std::string>> e;
  for (auto [a, b] : edges_) {
    if (a == from) a = to;
    if (b == from) b = to;
    e.insert(key(a, b));
  }
  edges_.swap(e);
}

bool Graph::has_vertex(const std::string& v) const {
  return std::any_of(vertices_.begin(), vertices_.end(),
                     [&](const RegisterId& r) { return r.label == v; });
}

bool Graph::has_edge(const std::string& a, const std::string& b) const {
  return edges_.count(key(a, b)) > 0;
}

std::vector<std::string> Graph::neighbors(const std::string& v) const {
  if (!has_vertex(v))
    throw Error(ErrorCode::UnknownRegister, "vertex '" + v + "' absent");
  std::vector<std::string> out;
  for (const auto& [a, b] : edges_) {
    if (a == v) out.push_back(b);
    if (b == v) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> Graph::labels() const {
  std::vector<std::string> out;
  for (const auto& r : vertices_) out.push_back(r.label);
  return out;
}

void Graph::validate() const {
  std::set<std::string> seen;
  for (const auto& r : vertices_) {
    if (!seen.insert(r.label).second)
      throw Error(ErrorCode::DuplicateRegister, "duplicate vertex");
    if (r.dim < 2) throw Error(ErrorCode::InvalidArgument, "vertex dim < 2");
  }
  for (const auto& [a, b] : edges_) {
    if (a == b) throw Error(ErrorCode::InvalidArgument, "self loop");
    if (!seen.count(a) || !seen.count(b))
      throw Error(ErrorCode::InvalidArgument, "edge references missing vertex");
  }
}

Graph Graph::disjoint_union(const Graph& a, const Graph& b) {
  Graph g = a;
  for (const auto& v : b.vertices_) g.add_vertex(v);
  for (const auto& e : b.edges_) g.edges_.insert(e);
  return g;
}

Graph Graph::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Config, std::string("graph JSON: ") + e.what());
  }
  Graph g;
  try {
    for (const auto& v : j.at("vertices")) {
      RegisterId r{v.at("label").get<std::string>(), v.value("dim", 2)};
      g.add_vertex(r);
    }
    if (j.contains("edges"))
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2)
          throw Error(ErrorCode::Config, "edge must be a pair of labels");
        g.add_edge(e[0].get<std::string>(), e[1].get<std::string>());
      }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Config, std::string("graph JSON: ") + e.what());
  }
  g.validate();
  return g;
}

std::string Graph::to_json_text() const {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : vertices_)
    j["vertices"].push_back({{"label", v.label}, {"dim", v.dim}});
  j["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : edges_) j["edges"].push_back({a, b});
  return j.dump();
}

Graph star_graph(const std::vector<std::string>& labels) {
  Graph g;
  for (const auto& l : labels) g.add_vertex(l);
  for (std::size_t i = 1; i < labels.size(); ++i) g.add_edge(labels[0], labels[i]);
  return g;
}

Graph path_graph(const std::vector<std::string>& labels) {
  Graph g;
  for (const auto& l : labels) g.add_vertex(l);
  for (std::size_t i = 1; i < labels.size(); ++i)
    g.add_edge(labels[i - 1], labels[i]);
  return g;
}

Graph grid_graph(int rows, int cols, const std::vector<std::string>& labels) {
  if (static_cast<int>(labels.size()) != rows * cols)
    throw Error(ErrorCode::InvalidArgument, "grid needs rows*cols labels");
  Graph g;
  for (const auto& l : labels) g.add_vertex(l);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) g.add_edge(labels[r * cols + c], labels[r * cols + c + 1]);
      if (r + 1 < rows) g.add_edge(labels[r * cols + c], labels[(r + 1) * cols + c]);
    }
  return g;
}

PureState graph_state_vector(const Graph& g) {
  g.validate();
  if (g.vertices().empty())
    throw Error(ErrorCode::InvalidArgument, "graph has no vertices");
  for (const auto& v : g.vertices())
    if (v.dim != 2)
      throw Error(ErrorCode::InvalidArgument, "graph states need qubit vertices");
  const std::size_t n = g.vertices().size();
  if (n > 20) throw Error(ErrorCode::SizeLimit, "graph too large");
  const std::size_t N = std::size_t{1} << n;
  Vector v(static_cast<Eigen::Index>(N));
  const double amp = 1.0 / std::sqrt(static_cast<double>(N));
  std::vector<std::pair<int, int>> e;
  auto pos = [&](const std::string& l) {
    for (std::size_t i = 0; i < n; ++i)
      if (g.vertices()[i].label == l) return static_cast<int>(n - 1 - i);
    return -1;
  };
  for (const auto& [a, b] : g.edges()) e.emplace_back(pos(a), pos(b));
  for (std::size_t x = 0; x < N; ++x) {
    int parity = 0;
    for (auto [p, q] : e) parity ^= ((x >> p) & 1) & ((x >> q) & 1);
    v[static_cast<Eigen::Index>(x)] = parity ? -amp : amp;
  }
  return PureState(g.vertices(), v);
}

GraphStateHandle prepare_graph_state(const Graph& g) {
  // CZ circuit on |+>^n
  g.validate();
  std::vector<RegisterId> regs = g.vertices();
  std::vector<int> zeros(regs.size(), 0);
  PureState s = new_state(regs, zeros);
  for (const auto& r : regs) apply_unitary_inplace(s, {r.label}, gates::h());
  for (const auto& [a, b] : g.edges()) apply_unitary_inplace(s, {a, b}, gates::cz());
  return {g, std::move(s)};
}

bool stabilizer_check(const Graph& g, const PureState& state, double tol) {
  for (const auto& v : g.vertices()) {
    PureState t = state;
    apply_unitary_inplace(t, {v.label}, gates::x());
    apply_z_all(t, g.neighbors(v.label));
    if ((t.amplitudes() - state.amplitudes()).norm() > tol) return false;
  }
  return true;
}

bool stabilizer_check(const GraphStateHandle& h, double tol) {
  return stabilizer_check(h.graph, h.state, tol);
}

void apply_z_all(PureState& s, const std::vector<std::string>& regs) {
  for (const auto& r : regs) apply_unitary_inplace(s, {r}, gates::z(s.dim(r)));
}

GraphOpResult cut_vertex(const GraphStateHandle& h, const std::string& a,
                         const Policy& policy) {
  if (!h.graph.has_vertex(a))
    throw Error(ErrorCode::UnknownRegister, "vertex '" + a + "' absent");
  GraphOpResult r{h, {}};
  auto nb = h.graph.neighbors(a);
  auto o = z_measure_inplace(r.handle.state, a, policy);
  if (o.outcome == 1) apply_z_all(r.handle.state, nb);
  r.handle.graph.remove_vertex(a);
  r.record = {o.outcome, o.probability, r.handle.state};
  return r;
}

std::vector<Matrix> merging_operators() {
  Matrix p0 = Matrix::Zero(2, 4), p1 = Matrix::Zero(2, 4);
  p0(0, 0) = 1.0;  // |0><00|
  p0(1, 3) = 1.0;  // |1><11|
  p1(0, 1) = 1.0;  // |0><01|
  p1(1, 2) = 1.0;  // |1><10|
  return {p0, p1};
}

GraphOpResult merge_within(const GraphStateHandle& h, const std::string& a1,
                           const std::string& a2, const Policy& policy) {
  if (!h.graph.has_vertex(a1) || !h.graph.has_vertex(a2))
    throw Error(ErrorCode::UnknownRegister, "merge vertex absent");
  if (h.graph.has_edge(a1, a2))
    throw Error(ErrorCode::PreconditionFailed, "merged vertices are adjacent");
  GraphOpResult r{h, {}};
  auto n1 = h.graph.neighbors(a1);
  auto n2 = h.graph.neighbors(a2);
  auto o = measure_inplace(r.handle.state, {a1, a2}, merging_operators(), policy,
                           {{a1, 2}});
  if (o.outcome == 1) apply_z_all(r.handle.state, n2);
  Graph& g = r.handle.graph;
  g.remove_vertex(a2);
  for (const auto& v : n2) g.toggle_edge(a1, v);
  r.record = {o.outcome, o.probability, r.handle.state};
  return r;
}

GraphOpResult merge_vertices(const GraphStateHandle& h1,
                             const GraphStateHandle& h2, const std::string& a1,
                             const std::string& a2, const Policy& policy) {
  for (const auto& v : h1.state.registers())
    if (h2.state.has(v.label))
      throw Error(ErrorCode::DuplicateRegister,
                  "graph states share register '" + v.label + "'");
  if (!h1.graph.has_vertex(a1) || !h2.graph.has_vertex(a2))
    throw Error(ErrorCode::UnknownRegister, "merge vertex absent");
  GraphStateHandle joint{Graph::disjoint_union(h1.graph, h2.graph),
                         tensor(h1.state, h2.state)};
  return merge_within(joint, a1, a2, policy);
}

PureState ghz_state(int n, int d, const std::vector<std::string>& labels) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "GHZ needs n >= 2");
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "GHZ needs d >= 2");
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw Error(ErrorCode::InvalidArgument, "GHZ label count != n");
  std::vector<RegisterId> regs;
  for (int i = 0; i < n; ++i)
    regs.push_back({labels.empty() ? "q" + std::to_string(i) : labels[i], d});
  std::size_t N = 1;
  for (int i = 0; i < n; ++i) {
    N *= static_cast<std::size_t>(d);
    if (N > kMaxDimension) throw Error(ErrorCode::SizeLimit, "GHZ too large");
  }
  Vector v = Vector::Zero(static_cast<Eigen::Index>(N));
  std::size_t rep = 0;  // index of |11..1>
  for (int i = 0; i < n; ++i) rep = rep * d + 1;
  for (int j = 0; j < d; ++j)
    v[static_cast<Eigen::Index>(j * rep)] = 1.0 / std::sqrt(double(d));
  return PureState(regs, v);
}

}  // namespace qnetsup
