#pragma once

#include <string>
#include <vector>

namespace firemap {

// Per-node parameters: recovery rate and outbreak cost.
struct NodeParams {
  double delta = 0.0;  // recovery rate, 1/time
  double cost = 0.0;   // c_i, dimensionless
};

// Directed spreading edge: fire on src ignites dst at rate beta.
struct Edge {
  int src = 0;
  int dst = 0;
  double beta = 0.0;  // spreading rate, 1/time
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Directed weighted spreading graph. Immutable by convention once validated.
struct SpreadGraph {
  int n = 0;
  std::vector<NodeParams> nodes;  // size n
  std::vector<Edge> edges;
  std::vector<Vec2> geometry;  // empty, or one position per node

  bool has_geometry() const { return !geometry.empty(); }
};

// Throws std::invalid_argument unless all SpreadGraph invariants hold:
// node ids in range, no self-loops, at most one edge per (src, dst),
// nonnegative finite rates and costs, geometry empty or size n.
void validate(const SpreadGraph& graph);

// The 16-node example graph: 4x4 grid augmented with the main-diagonal
// chain 1-6-11-16, where node 16 (id 15) keeps only its link to node 11
// (id 10). All edges bidirectional with beta = 0.5, recovery delta = 0.2,
// costs 0.1 except node 16 at 1.0; geometry is the 4x4 cell centers.
SpreadGraph grid16_fixture();

// Text interchange format (see README for the grammar):
//   graph <n>
//   nodes
//   <id> <delta> <cost> [<x> <y>]
//   edges
//   <src> <dst> <beta>
SpreadGraph parse_graph(const std::string& text);
std::string format_graph(const SpreadGraph& graph);

}  // namespace firemap
