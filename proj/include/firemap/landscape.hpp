#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "firemap/graph.hpp"

namespace firemap {

enum class CellClass { desert, grassland, eucalyptus, city, water };

char cell_code(CellClass c);                // {D,G,E,C,W}
CellClass cell_from_code(char code);        // throws on unknown code

// Raster landscape: row-major grid of cell classes.
struct LandscapeGrid {
  int rows = 0;
  int cols = 0;
  std::vector<CellClass> cells;  // rows*cols, row-major

  CellClass at(int r, int c) const { return cells[r * cols + c]; }
};

// Spreading-rate parameters for graph construction. The vegetation factor
// applies to the destination cell (fire spreads into a cell at a rate set by
// that cell's fuel); water is unburnable.
struct RateParams {
  double beta0 = 0.5;
  double delta = 0.2;
  double diag_factor = 0.785;
  std::map<CellClass, double> veg_factor = {
      {CellClass::desert, 0.4},     {CellClass::grassland, 1.0},
      {CellClass::eucalyptus, 1.4}, {CellClass::city, 0.5},
      {CellClass::water, 0.0}};
  std::map<CellClass, double> cost = {
      {CellClass::desert, 0.01},     {CellClass::grassland, 0.01},
      {CellClass::eucalyptus, 0.01}, {CellClass::city, 1.0},
      {CellClass::water, 0.01}};
};

// Wind: direction is the compass-independent angle the wind blows toward,
// in radians, in grid coordinates (x = column, y = row).
struct WindField {
  double speed = 0.0;  // m/s
  double direction = 0.0;
  double c1 = 0.045;
  double c2 = 0.131;
};

// Parses the grid file format: first line "rows cols", then rows lines of
// exactly cols characters from {D,G,E,C,W}. Throws std::invalid_argument on
// dimension mismatch, unknown codes, or empty input.
LandscapeGrid load_grid(const std::string& text);
std::string format_grid(const LandscapeGrid& grid);

// Multiplicative wind adjustment for an edge with the given bearing:
// exp(speed * (c1 + c2 * (cos(bearing - direction) - 1))). Equals
// exp(speed * c1) downwind and decreases monotonically with angular offset.
double wind_factor(double edge_bearing, const WindField& wind);

// One node per cell, 8-neighborhood edges with
// beta = beta0 * veg_factor(dest) * diag_factor(if diagonal) * wind_factor.
// Edges into water are omitted. Geometry set to cell centers (x=col, y=row).
SpreadGraph to_graph(const LandscapeGrid& grid, const RateParams& params,
                     const std::optional<WindField>& wind = std::nullopt);

// The bundled 25x40 demo landscape (desert, eucalyptus corridor, river with
// a single bridge, moat-shielded city with a two-cell gate). Identical to
// data/demo_landscape.grid.
LandscapeGrid demo_landscape();

}  // namespace firemap
