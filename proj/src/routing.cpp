#include "firemap/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace firemap {

namespace {

double dist(const Waypoint& a, const Waypoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double tour_length(const std::vector<int>& order,
                   const std::vector<std::vector<double>>& d) {
  double len = 0.0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    len += d[order[k]][order[k + 1]];
  }
  len += d[order.back()][order.front()];
  return len;
}

}  // namespace

double Waypoint::payload_amount() const {
  double sum = 0.0;
  for (const Target& t : payload) sum += t.amount;
  return sum;
}

std::vector<Waypoint> targets_to_waypoints(const std::vector<Target>& targets,
                                           const SpreadGraph& graph) {
  if (!graph.has_geometry()) {
    throw std::invalid_argument("graph has no geometry for waypoint placement");
  }
  std::vector<Waypoint> waypoints;
  std::map<std::pair<double, double>, int> by_position;
  for (const Target& t : targets) {
    if (t.src < 0 || t.src >= graph.n || t.dst < 0 || t.dst >= graph.n) {
      throw std::invalid_argument("target endpoint outside the graph");
    }
    const Vec2 a = graph.geometry[t.dst];
    const Vec2 b = graph.geometry[t.src];
    // Commutative midpoint: both directions of a link land on the same bits.
    const double x = t.src == t.dst ? a.x : 0.5 * (a.x + b.x);
    const double y = t.src == t.dst ? a.y : 0.5 * (a.y + b.y);
    auto [it, fresh] = by_position.try_emplace({x, y}, int(waypoints.size()));
    if (fresh) {
      waypoints.push_back({int(waypoints.size()), x, y, {t}});
    } else {
      waypoints[it->second].payload.push_back(t);
    }
  }
  return waypoints;
}

Tour solve_tsp(const std::vector<Waypoint>& waypoints, TspMethod method,
               std::optional<int> depot) {
  const int n = static_cast<int>(waypoints.size());
  if (n < 1) throw std::invalid_argument("at least one waypoint required");
  int start = depot.value_or(waypoints.front().id);
  int start_idx = -1;
  for (int i = 0; i < n; ++i) {
    if (waypoints[i].id == start) start_idx = i;
  }
  if (start_idx < 0) throw std::invalid_argument("depot id not among waypoints");

  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d[i][j] = dist(waypoints[i], waypoints[j]);
  }

  std::vector<int> order;  // indices into waypoints, starting at start_idx
  if (n == 1) {
    order = {0};
  } else if (method == TspMethod::exact) {
    if (n > 18) {
      throw std::invalid_argument(
          "exact tour solve is limited to 18 waypoints; use the heuristic");
    }
    // Held-Karp over subsets of the non-depot waypoints.
    std::vector<int> rest;
    for (int i = 0; i < n; ++i) {
      if (i != start_idx) rest.push_back(i);
    }
    const int m = n - 1;
    const std::size_t full = std::size_t(1) << m;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best(full, std::vector<double>(m, inf));
    std::vector<std::vector<int>> parent(full, std::vector<int>(m, -1));
    for (int k = 0; k < m; ++k) {
      best[std::size_t(1) << k][k] = d[start_idx][rest[k]];
    }
    for (std::size_t mask = 1; mask < full; ++mask) {
      for (int last = 0; last < m; ++last) {
        if (!(mask >> last & 1) || best[mask][last] == inf) continue;
        for (int nxt = 0; nxt < m; ++nxt) {
          if (mask >> nxt & 1) continue;
          const std::size_t nm = mask | std::size_t(1) << nxt;
          const double cand = best[mask][last] + d[rest[last]][rest[nxt]];
          if (cand < best[nm][nxt]) {
            best[nm][nxt] = cand;
            parent[nm][nxt] = last;
          }
        }
      }
    }
    double top = inf;
    int last = -1;
    for (int k = 0; k < m; ++k) {
      const double cand = best[full - 1][k] + d[rest[k]][start_idx];
      if (cand < top) {
        top = cand;
        last = k;
      }
    }
    std::vector<int> tail;
    std::size_t mask = full - 1;
    while (last >= 0) {
      tail.push_back(rest[last]);
      const int prev = parent[mask][last];
      mask &= ~(std::size_t(1) << last);
      last = prev;
    }
    order.push_back(start_idx);
    order.insert(order.end(), tail.rbegin(), tail.rend());
  } else {
    // Nearest neighbor, ties to the lowest index.
    std::vector<char> used(n, 0);
    order.push_back(start_idx);
    used[start_idx] = 1;
    while (int(order.size()) < n) {
      const int at = order.back();
      int pick = -1;
      double bestd = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        if (!used[i] && d[at][i] < bestd) {
          bestd = d[at][i];
          pick = i;
        }
      }
      order.push_back(pick);
      used[pick] = 1;
    }
    // 2-opt, first improving move in fixed index order, repeat to local opt.
    bool improved = true;
    while (improved) {
      improved = false;
      for (int a = 0; a + 1 < n && !improved; ++a) {
        for (int b = a + 1; b < n && !improved; ++b) {
          const int pa = order[a], na = order[(a + 1) % n];
          const int pb = order[b], nb = order[(b + 1) % n];
          if (na == pb || nb == pa) continue;
          const double delta =
              d[pa][pb] + d[na][nb] - d[pa][na] - d[pb][nb];
          if (delta < -1e-12) {
            std::reverse(order.begin() + a + 1, order.begin() + b + 1);
            improved = true;
          }
        }
      }
    }
  }

  Tour tour;
  tour.length = n == 1 ? 0.0 : tour_length(order, d);
  tour.order.reserve(order.size());
  for (int idx : order) tour.order.push_back(waypoints[idx].id);
  return tour;
}

}  // namespace firemap
