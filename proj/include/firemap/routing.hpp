#pragma once

#include <optional>
#include <vector>

#include "firemap/graph.hpp"
#include "firemap/intervention.hpp"

namespace firemap {

// Tour stop: edge targets sit at the midpoint of the endpoints, node targets
// at the node. Both directions of a link (and any coincident positions)
// merge into one waypoint with the payloads concatenated.
struct Waypoint {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  std::vector<Target> payload;

  double payload_amount() const;
};

// Closed tour visiting every waypoint exactly once.
struct Tour {
  std::vector<int> order;  // waypoint ids, first == depot, closing leg implied
  double length = 0.0;     // total Euclidean length
};

std::vector<Waypoint> targets_to_waypoints(const std::vector<Target>& targets,
                                           const SpreadGraph& graph);

enum class TspMethod { exact, heuristic };

// exact: optimal tour by dynamic programming over subsets (at most 18
// waypoints; throws above that). heuristic: nearest-neighbor construction
// plus 2-opt to a local optimum, scanning in fixed index order. Both start
// from the first waypoint unless a depot id is given, and both are
// deterministic. The heuristic never beats the exact length.
Tour solve_tsp(const std::vector<Waypoint>& waypoints, TspMethod method,
               std::optional<int> depot = std::nullopt);

}  // namespace firemap
