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

// JSON topology/program loader. Schema lives in docs/topology.md.

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "qnetsup/network.hpp"

namespace qnetsup {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& msg) {
  throw Error(ErrorCode::Config, "topology: " + msg);
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string str(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> strs(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) bad(std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) bad(std::string("field '") + key + "' holds a non-string");
    out.push_back(e.get<std::string>());
  }
  return out;
}

cplx complex_of(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  bad("complex numbers are a number or [re, im]");
}

Vector vector_of(const json& v) {
  if (!v.is_array() || v.empty()) bad("amplitude list must be a nonempty array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = complex_of(v[i]);
  return out;
}

Matrix matrix_of(const json& v) {
  if (!v.is_array() || v.empty()) bad("matrix must be an array of rows");
  const auto n = static_cast<Eigen::Index>(v.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      bad("matrix must be square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = complex_of(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

Matrix named_gate(const std::string& name, int dim) {
  if (name == "i") return gates::identity(dim);
  if (name == "x") return gates::x(dim);
  if (name == "z") return gates::z(dim);
  if (name == "f") return gates::fourier(dim);
  if (dim != 2) bad("gate '" + name + "' needs qubit targets");
  if (name == "y") return gates::y();
  if (name == "h") return gates::h();
  if (name == "s") return gates::s();
  if (name == "cz") return gates::cz();
  if (name == "cnot") return gates::cnot();
  if (name == "swap") return gates::swap(2);
  bad("unknown gate '" + name + "'");
}

// Either {"gate": name, "power": k} or {"matrix": [[..]]} or a bare name.
Matrix gate_of(const json& j, int dim) {
  if (j.is_string()) return named_gate(j.get<std::string>(), dim);
  if (j.is_object() && j.contains("matrix")) return matrix_of(j.at("matrix"));
  if (j.is_object() && j.contains("gate")) {
    Matrix g = named_gate(str(j, "gate"), dim);
    int p = j.value("power", 1);
    return gates::power(g, p);
  }
  bad("gate must be a name, {gate, power} or {matrix}");
}

Step parse_step(const json& j, const NetworkState& net,
                const std::map<std::string, int>& declared_dims) {
  const std::string op = str(j, "op");
  auto dim_of = [&](const std::string& l) {
    auto it = declared_dims.find(l);
    if (it != declared_dims.end()) return it->second;
    return net.global.has(l) ? net.global.dim(l) : 2;
  };
  if (op == "noop") return step::noop();
  const std::string dev = op == "prepare" ? std::string() : str(j, "device");
  if (op == "unitary") {
    auto t = strs(j, "targets");
    if (t.empty()) bad("unitary without targets");
    Matrix u = j.contains("matrix") ? matrix_of(j.at("matrix"))
                                    : gate_of(j.contains("gate") ? j : json(str(j, "gate")),
                                              dim_of(t[0]));
    return step::unitary(dev, t, u);
  }
  if (op == "swap") {
    auto t = strs(j, "targets");
    if (t.size() != 2) bad("swap takes two targets");
    return step::swap(dev, t[0], t[1]);
  }
  if (op == "prepare") {
    const json& regs = field(j, "registers");
    if (!regs.is_array() || regs.empty()) bad("prepare needs registers");
    std::vector<RegisterId> ids;
    std::vector<std::string> owners;
    std::size_t total = 1;
    for (const auto& r : regs) {
      RegisterId id{str(r, "label"), r.value("dim", 2)};
      if (id.dim < 2) bad("register dim must be >= 2");
      ids.push_back(id);
      owners.push_back(str(r, "owner"));
      total *= static_cast<std::size_t>(id.dim);
    }
    Vector amps;
    std::string st = j.value("state", std::string("zero"));
    if (j.contains("amplitudes")) {
      amps = vector_of(j.at("amplitudes"));
    } else if (st == "zero") {
      amps = Vector::Zero(static_cast<Eigen::Index>(total));
      amps[0] = 1;
    } else if (st == "plus") {
      amps = Vector::Constant(static_cast<Eigen::Index>(total),
                              1.0 / std::sqrt(static_cast<double>(total)));
    } else if (st == "bell") {
      if (ids.size() != 2 || ids[0].dim != ids[1].dim) bad("bell prepare needs a matched pair");
      amps = gates::bell_vector(ids[0].dim, 0, 0);
    } else {
      bad("unknown prepare state '" + st + "'");
    }
    if (static_cast<std::size_t>(amps.size()) != total) bad("amplitude count mismatch");
    return step::prepare(ids, owners, amps);
  }
  if (op == "measure") {
    const std::string id = str(j, "id");
    const std::string basis = j.value("basis", std::string("z"));
    auto t = strs(j, "targets");
    if (t.empty()) bad("measure without targets");
    if (basis == "z") {
      if (t.size() != 1) bad("z measurement takes one target");
      return step::measure_z(dev, id, t[0], j.value("keep", false));
    }
    if (basis == "x") {
      if (t.size() != 1) bad("x measurement takes one target");
      return step::measure_x(dev, id, t[0]);
    }
    if (t.size() != 2) bad(basis + " measurement takes two targets");
    if (basis == "bell") return step::measure_bell(dev, id, t[0], t[1]);
    if (basis == "merge") return step::measure_merge(dev, id, t[0], t[1]);
    bad("unknown basis '" + basis + "'");
  }
  if (op == "correct") {
    auto t = strs(j, "targets");
    if (t.empty()) bad("correct without targets");
    const json& tab = field(j, "table");
    if (!tab.is_object()) bad("correction table must be an object");
    std::map<int, Matrix> table;
    for (auto it = tab.begin(); it != tab.end(); ++it) {
      int k = 0;
      try {
        k = std::stoi(it.key());
      } catch (const std::exception&) {
        bad("correction table keys are outcome indices");
      }
      table[k] = gate_of(it.value(), dim_of(t[0]));
    }
    return step::correct(dev, str(j, "measurement"), t, std::move(table));
  }
  if (op == "rename") return step::rename(dev, str(j, "from"), str(j, "to"));
  if (op == "embed") {
    auto t = strs(j, "targets");
    if (t.size() != 2) bad("embed takes [hi, lo]");
    return step::embed(dev, t[0], t[1], str(j, "to"));
  }
  bad("unknown op '" + op + "'");
}

void add_resource(NetworkState& net, const json& j, const std::vector<std::string>& ids) {
  if (!j.contains("resource")) return;
  const json& r = j.at("resource");
  const int n = static_cast<int>(ids.size());
  if (r.is_string()) {
    const std::string kind = r.get<std::string>();
    if (kind == "bell_mesh") {
      std::vector<std::pair<std::string, std::string>> links;
      if (j.contains("links")) {
        for (const auto& l : j.at("links")) {
          if (!l.is_array() || l.size() != 2 || !l[0].is_string() || !l[1].is_string())
            bad("links are [id, id] pairs");
          links.emplace_back(l[0].get<std::string>(), l[1].get<std::string>());
        }
      } else {
        for (int a = 0; a < n; ++a)
          for (int b = a + 1; b < n; ++b) links.emplace_back(ids[a], ids[b]);
      }
      for (const auto& [a, b] : links) {
        net.device(a);
        net.device(b);
        if (a == b) bad("link joins a device to itself");
        PureState pair({{a + "." + b, 2}, {b + "." + a, 2}}, gates::bell_vector(2, 0, 0));
        net.add_registers(pair, {a, b});
        if (!net.topology.has_edge(a, b)) net.topology.add_edge(a, b);
      }
      return;
    }
    if (kind == "ghz") {
      if (n < 2) bad("ghz resource needs two devices");
      std::vector<std::string> labels;
      for (const auto& id : ids) labels.push_back(id + ".g");
      net.add_registers(ghz_state(n, 2, labels), ids);
      return;
    }
    if (kind == "cluster_grid") {
      const json& g = field(j, "grid");
      int rows = g.value("rows", 0), cols = g.value("cols", 0);
      if (rows * cols != n || rows < 1) bad("grid rows*cols must equal the device count");
      std::vector<std::string> labels;
      for (const auto& id : ids) labels.push_back(id + ".v");
      net.add_registers(graph_state_vector(grid_graph(rows, cols, labels)), ids);
      return;
    }
    bad("unknown resource '" + kind + "'");
  }
  if (!r.is_object()) bad("resource must be a name or a graph object");
  Graph g = Graph::from_json_text(r.dump());
  std::vector<std::string> owners;
  for (const auto& v : r.at("vertices")) {
    std::string owner = v.value("owner", std::string());
    if (owner.empty()) {
      const std::string l = v.at("label").get<std::string>();
      owner = l.substr(0, l.find('.'));
    }
    if (std::find(ids.begin(), ids.end(), owner) == ids.end())
      bad("graph vertex owner '" + owner + "' is not a device");
    owners.push_back(owner);
  }
  net.add_registers(graph_state_vector(g), owners);
}

}  // namespace

TopologyProgram load_topology(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    bad(std::string("parse error: ") + e.what());
  }
  try {
    TopologyProgram tp;
    std::vector<std::string> ids;
    for (const auto& d : field(j, "devices")) {
      std::string id = d.is_string() ? d.get<std::string>() : str(d, "id");
      if (id.empty() || id.find('.') != std::string::npos)
        bad("device ids must be nonempty and dot-free");
      ids.push_back(id);
    }
    if (ids.empty()) bad("no devices");
    if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size())
      bad("duplicate device id");
    const std::string initiator = str(j, "initiator");
    if (std::find(ids.begin(), ids.end(), initiator) == ids.end())
      bad("initiator is not a device");

    const json& br = field(j, "branches");
    if (!br.is_array() || br.empty()) bad("branches must be a nonempty array");
    const int m = static_cast<int>(br.size());

    if (m >= 2) {
      tp.net = make_request_network(ids, m, initiator);
    } else {
      tp.net.initiator = initiator;
      for (const auto& id : ids) {
        Device d;
        d.id = id;
        tp.net.devices.push_back(d);
        tp.net.topology.add_vertex(RegisterId{id, 2});
      }
    }
    add_resource(tp.net, j, ids);
    if (tp.net.global.size() > kMaxDimension) bad("state exceeds the size ceiling");

    if (j.contains("weights")) {
      for (const auto& w : j.at("weights")) tp.weights.push_back(complex_of(w));
      if (static_cast<int>(tp.weights.size()) != m) bad("one weight per branch");
    } else {
      tp.weights.assign(m, cplx(1.0 / std::sqrt(static_cast<double>(m)), 0.0));
    }

    // dims of registers introduced by prepare steps, for gate sizing
    std::map<std::string, int> declared;
    for (const auto& b : br)
      for (const auto& s : field(b, "steps"))
        if (s.value("op", std::string()) == "prepare")
          for (const auto& r : s.at("registers"))
            declared[r.value("label", std::string())] = r.value("dim", 2);
    for (const auto& b : br) {
      BranchProgram p;
      p.branch = field(b, "branch").get<int>();
      for (const auto& s : field(b, "steps")) p.steps.push_back(parse_step(s, tp.net, declared));
      tp.programs.push_back(std::move(p));
    }
    tp.collapse = j.value("collapse", true);

    if (j.contains("checks")) {
      for (const auto& c : j.at("checks")) {
        TopologyCheck ck;
        ck.name = str(c, "name");
        ck.kind = str(c, "kind");
        ck.expected = c.value("expected", 0.0);
        ck.tolerance = c.value("tolerance", 1e-6);
        if (ck.kind == "negativity") {
          ck.keep = strs(c, "keep");
          ck.side_a = strs(c, "side_a");
        } else if (ck.kind == "fidelity") {
          for (const auto& r : field(c, "registers"))
            ck.target_regs.push_back({str(r, "label"), r.value("dim", 2)});
          ck.target = vector_of(field(c, "amplitudes"));
        } else if (ck.kind != "norm") {
          bad("unknown check kind '" + ck.kind + "'");
        }
        tp.checks.push_back(std::move(ck));
      }
    }
    return tp;
  } catch (const json::exception& e) {
    bad(std::string("schema error: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    bad(e.what());
  }
}

}  // namespace qnetsup
