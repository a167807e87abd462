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

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qnetsup/engine.hpp"

namespace qnetsup {

class Graph {
 public:
  Graph() = default;

  void add_vertex(const RegisterId& v);
  void add_vertex(const std::string& label) { add_vertex(RegisterId{label, 2}); }
  void add_edge(const std::string& a, const std::string& b);
  void remove_edge(const std::string& a, const std::string& b);
  void toggle_edge(const std::string& a, const std::string& b);
  void remove_vertex(const std::string& v);
  void isolate(const std::string& v);
  void rename(const std::string& from, const std::string& to);

  bool has_vertex(const std::string& v) const;
  bool has_edge(const std::string& a, const std::string& b) const;
  std::vector<std::string> neighbors(const std::string& v) const;
  const std::vector<RegisterId>& vertices() const { return vertices_; }
  const std::set<std::pair<std::string, std::string>>& edges() const {
    return edges_;
  }
  std::vector<std::string> labels() const;

  // Throws InvalidArgument on self loops or dangling edges.
  void validate() const;

  // Disjoint union; labels must not collide.
  static Graph disjoint_union(const Graph& a, const Graph& b);

  // {"vertices":[{"label":..,"dim":..}],"edges":[[a,b],..]}
  static Graph from_json_text(const std::string& text);
  std::string to_json_text() const;

 private:
  std::vector<RegisterId> vertices_;
  std::set<std::pair<std::string, std::string>> edges_;
};

Graph star_graph(const std::vector<std::string>& labels);  // labels[0] is center
Graph path_graph(const std::vector<std::string>& labels);
Graph grid_graph(int rows, int cols, const std::vector<std::string>& labels);

struct GraphStateHandle {
  Graph graph;
  PureState state;
};

GraphStateHandle prepare_graph_state(const Graph& g);
// |G> on the graph's vertices, tensored after nothing else.
PureState graph_state_vector(const Graph& g);

bool stabilizer_check(const Graph& g, const PureState& state,
                      double tol = kAlgebraTol);
bool stabilizer_check(const GraphStateHandle& h, double tol = kAlgebraTol);

// Applies Z on every listed register.
void apply_z_all(PureState& s, const std::vector<std::string>& regs);

struct GraphOpResult {
  GraphStateHandle handle;
  MeasurementRecord record;
};

GraphOpResult cut_vertex(const GraphStateHandle& h, const std::string& a,
                         const Policy& policy);

// Merge across two independent graph states.
GraphOpResult merge_vertices(const GraphStateHandle& h1,
                             const GraphStateHandle& h2, const std::string& a1,
                             const std::string& a2, const Policy& policy);

// Merge two non-adjacent vertices of the same graph; neighborhoods combine by
// symmetric difference.
GraphOpResult merge_within(const GraphStateHandle& h, const std::string& a1,
                           const std::string& a2, const Policy& policy);

// Kraus pair {|0><00|+|1><11|, |0><01|+|1><10|}.
std::vector<Matrix> merging_operators();

PureState ghz_state(int n, int d, const std::vector<std::string>& labels = {});

}  // namespace qnetsup
