#include "firemap/landscape.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace firemap {

char cell_code(CellClass c) {
  switch (c) {
    case CellClass::desert: return 'D';
    case CellClass::grassland: return 'G';
    case CellClass::eucalyptus: return 'E';
    case CellClass::city: return 'C';
    case CellClass::water: return 'W';
  }
  throw std::invalid_argument("invalid cell class");
}

CellClass cell_from_code(char code) {
  switch (code) {
    case 'D': return CellClass::desert;
    case 'G': return CellClass::grassland;
    case 'E': return CellClass::eucalyptus;
    case 'C': return CellClass::city;
    case 'W': return CellClass::water;
  }
  throw std::invalid_argument(std::string("unknown cell code '") + code + "'");
}

LandscapeGrid load_grid(const std::string& text) {
  if (text.empty()) {
    throw std::invalid_argument("empty grid input");
  }
  std::istringstream in(text);
  LandscapeGrid grid;
  std::string header;
  if (!std::getline(in, header)) {
    throw std::invalid_argument("missing grid header");
  }
  std::istringstream hs(header);
  if (!(hs >> grid.rows >> grid.cols) || grid.rows <= 0 || grid.cols <= 0) {
    throw std::invalid_argument("grid header must be 'rows cols' with positive values");
  }
  std::string extra;
  if (hs >> extra) {
    throw std::invalid_argument("grid header must be 'rows cols'");
  }
  grid.cells.reserve(static_cast<size_t>(grid.rows) * grid.cols);
  std::string line;
  for (int r = 0; r < grid.rows; ++r) {
    if (!std::getline(in, line)) {
      throw std::invalid_argument("grid has fewer rows than declared");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<int>(line.size()) != grid.cols) {
      throw std::invalid_argument("grid row " + std::to_string(r) + " has " +
                                  std::to_string(line.size()) + " cells, expected " +
                                  std::to_string(grid.cols));
    }
    for (char code : line) {
      grid.cells.push_back(cell_from_code(code));
    }
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) {
      throw std::invalid_argument("grid has more rows than declared");
    }
  }
  return grid;
}

std::string format_grid(const LandscapeGrid& grid) {
  std::ostringstream out;
  out << grid.rows << " " << grid.cols << "\n";
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      out << cell_code(grid.at(r, c));
    }
    out << "\n";
  }
  return out.str();
}

double wind_factor(double edge_bearing, const WindField& wind) {
  if (wind.speed < 0.0) {
    throw std::invalid_argument("wind speed must be >= 0");
  }
  const double offset = std::cos(edge_bearing - wind.direction) - 1.0;
  return std::exp(wind.speed * (wind.c1 + wind.c2 * offset));
}

SpreadGraph to_graph(const LandscapeGrid& grid, const RateParams& params,
                     const std::optional<WindField>& wind) {
  if (grid.rows <= 0 || grid.cols <= 0 ||
      static_cast<int>(grid.cells.size()) != grid.rows * grid.cols) {
    throw std::invalid_argument("invalid landscape grid");
  }
  for (const auto& [cls, factor] : params.veg_factor) {
    if (factor < 0.0) {
      throw std::invalid_argument("vegetation factors must be >= 0");
    }
    if (cls == CellClass::water && factor != 0.0) {
      throw std::invalid_argument("water must have vegetation factor 0");
    }
  }
  SpreadGraph graph;
  graph.n = grid.rows * grid.cols;
  graph.nodes.resize(graph.n);
  graph.geometry.resize(graph.n);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const int id = r * grid.cols + c;
      graph.nodes[id].delta = params.delta;
      graph.nodes[id].cost = params.cost.at(grid.at(r, c));
      graph.geometry[id] = {static_cast<double>(c), static_cast<double>(r)};
    }
  }
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const int src = r * grid.cols + c;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int r2 = r + dr;
          const int c2 = c + dc;
          if (r2 < 0 || r2 >= grid.rows || c2 < 0 || c2 >= grid.cols) continue;
          const double veg = params.veg_factor.at(grid.at(r2, c2));
          if (veg <= 0.0) continue;  // unburnable destination
          double beta = params.beta0 * veg;
          if (dr != 0 && dc != 0) beta *= params.diag_factor;
          if (wind && wind->speed > 0.0) {
            const double bearing = std::atan2(static_cast<double>(dr),
                                              static_cast<double>(dc));
            beta *= wind_factor(bearing, *wind);
          }
          if (beta <= 0.0) continue;
          graph.edges.push_back({src, r2 * grid.cols + c2, beta});
        }
      }
    }
  }
  validate(graph);
  return graph;
}

namespace {

// 25x40 demo: desert northwest, eucalyptus corridor to a single river
// bridge, moat-shielded city with a two-cell gate in the southeast.
LandscapeGrid build_demo() {
  const int rows = 25, cols = 40;
  std::vector<std::string> g(rows, std::string(cols, 'G'));
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 12; ++c) g[r][c] = 'D';
  for (int r = 0; r < rows; ++r) {
    g[r][28] = 'W';
    g[r][29] = 'W';
  }
  g[15][28] = 'G';
  g[15][29] = 'G';
  for (int r = 12; r < 19; ++r)
    for (int c = 12; c < 28; ++c) g[r][c] = 'E';
  for (int r = 14; r < 17; ++r)
    for (int c = 30; c < 33; ++c) g[r][c] = 'E';
  for (int c = 31; c < 40; ++c) g[16][c] = 'W';
  for (int r = 16; r < 25; ++r) g[r][32] = 'W';
  g[16][33] = 'E';
  g[16][34] = 'E';
  for (int r = 17; r < 25; ++r)
    for (int c = 33; c < 40; ++c) g[r][c] = 'C';

  LandscapeGrid grid;
  grid.rows = rows;
  grid.cols = cols;
  grid.cells.reserve(static_cast<size_t>(rows) * cols);
  for (const std::string& row : g) {
    for (char code : row) grid.cells.push_back(cell_from_code(code));
  }
  return grid;
}

}  // namespace

LandscapeGrid demo_landscape() {
  static const LandscapeGrid grid = build_demo();
  return grid;
}

}  // namespace firemap
