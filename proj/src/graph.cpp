#include "firemap/graph.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace firemap {

void validate(const SpreadGraph& graph) {
  if (graph.n <= 0) {
    throw std::invalid_argument("graph must have at least one node");
  }
  if (static_cast<int>(graph.nodes.size()) != graph.n) {
    throw std::invalid_argument("node parameter list size does not match n");
  }
  for (int i = 0; i < graph.n; ++i) {
    const NodeParams& node = graph.nodes[i];
    if (!std::isfinite(node.delta) || node.delta < 0.0) {
      throw std::invalid_argument("node " + std::to_string(i) +
                                  ": recovery rate must be finite and >= 0");
    }
    if (!std::isfinite(node.cost) || node.cost < 0.0) {
      throw std::invalid_argument("node " + std::to_string(i) +
                                  ": cost must be finite and >= 0");
    }
  }
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : graph.edges) {
    if (e.src < 0 || e.src >= graph.n || e.dst < 0 || e.dst >= graph.n) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.src == e.dst) {
      throw std::invalid_argument("self-loop edge at node " +
                                  std::to_string(e.src));
    }
    if (!std::isfinite(e.beta) || e.beta < 0.0) {
      throw std::invalid_argument("edge rate must be finite and >= 0");
    }
    if (!seen.emplace(e.src, e.dst).second) {
      throw std::invalid_argument("duplicate edge " + std::to_string(e.src) +
                                  " -> " + std::to_string(e.dst));
    }
  }
  if (!graph.geometry.empty() &&
      static_cast<int>(graph.geometry.size()) != graph.n) {
    throw std::invalid_argument("geometry must be empty or one entry per node");
  }
  for (const Vec2& g : graph.geometry) {
    if (!std::isfinite(g.x) || !std::isfinite(g.y)) {
      throw std::invalid_argument("geometry coordinates must be finite");
    }
  }
}

SpreadGraph grid16_fixture() {
  SpreadGraph graph;
  graph.n = 16;
  graph.nodes.assign(16, NodeParams{0.2, 0.1});
  graph.nodes[15].cost = 1.0;

  std::set<std::pair<int, int>> pairs;
  auto add_pair = [&pairs](int a, int b) {
    pairs.emplace(a, b);
    pairs.emplace(b, a);
  };
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const int id = r * 4 + c;
      if (c + 1 < 4) add_pair(id, id + 1);
      if (r + 1 < 4) add_pair(id, id + 4);
    }
  }
  // node 16 keeps only the chain link to node 11
  for (int neighbor : {11, 14}) {
    pairs.erase({15, neighbor});
    pairs.erase({neighbor, 15});
  }
  // main diagonal chain 1-6-11-16
  add_pair(0, 5);
  add_pair(5, 10);
  add_pair(10, 15);

  for (const auto& [src, dst] : pairs) {
    graph.edges.push_back({src, dst, 0.5});
  }
  graph.geometry.resize(16);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      graph.geometry[r * 4 + c] = {static_cast<double>(c),
                                   static_cast<double>(r)};
    }
  }
  validate(graph);
  return graph;
}

SpreadGraph parse_graph(const std::string& text) {
  std::istringstream in(text);
  std::string token;
  if (!(in >> token) || token != "graph") {
    throw std::invalid_argument("graph file must start with 'graph <n>'");
  }
  SpreadGraph graph;
  if (!(in >> graph.n) || graph.n <= 0) {
    throw std::invalid_argument("invalid node count in graph header");
  }
  if (!(in >> token) || token != "nodes") {
    throw std::invalid_argument("expected 'nodes' section");
  }
  graph.nodes.resize(graph.n);
  std::vector<bool> defined(graph.n, false);
  std::string line;
  std::getline(in, line);  // rest of the 'nodes' line
  bool in_edges = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "edges") {
      in_edges = true;
      continue;
    }
    if (!in_edges) {
      int id = 0;
      NodeParams node;
      std::istringstream ns(line);
      if (!(ns >> id >> node.delta >> node.cost)) {
        throw std::invalid_argument("malformed node line: " + line);
      }
      if (id < 0 || id >= graph.n) {
        throw std::invalid_argument("node id out of range: " + line);
      }
      if (defined[id]) {
        throw std::invalid_argument("duplicate node id " + std::to_string(id));
      }
      defined[id] = true;
      graph.nodes[id] = node;
      double x = 0.0, y = 0.0;
      if (ns >> x >> y) {
        if (graph.geometry.empty()) graph.geometry.resize(graph.n);
        graph.geometry[id] = {x, y};
      }
    } else {
      Edge e;
      std::istringstream es(line);
      if (!(es >> e.src >> e.dst >> e.beta)) {
        throw std::invalid_argument("malformed edge line: " + line);
      }
      graph.edges.push_back(e);
    }
  }
  if (!in_edges) {
    throw std::invalid_argument("expected 'edges' section");
  }
  for (int i = 0; i < graph.n; ++i) {
    if (!defined[i]) {
      throw std::invalid_argument("node " + std::to_string(i) + " not defined");
    }
  }
  validate(graph);
  return graph;
}

std::string format_graph(const SpreadGraph& graph) {
  std::ostringstream out;
  out.precision(17);
  out << "graph " << graph.n << "\n";
  out << "nodes\n";
  for (int i = 0; i < graph.n; ++i) {
    out << i << " " << graph.nodes[i].delta << " " << graph.nodes[i].cost;
    if (graph.has_geometry()) {
      out << " " << graph.geometry[i].x << " " << graph.geometry[i].y;
    }
    out << "\n";
  }
  out << "edges\n";
  for (const Edge& e : graph.edges) {
    out << e.src << " " << e.dst << " " << e.beta << "\n";
  }
  return out.str();
}

}  // namespace firemap
