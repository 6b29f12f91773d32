#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "firemap/intervention.hpp"
#include "firemap/routing.hpp"
#include "firemap/simulate.hpp"

namespace firemap::io {

inline constexpr const char* kVersion = "0.1.0";

// Raster CSV: one line per grid row, comma-separated values with 6 decimals.
// Values are written as given; normalize first for the [0,1] convention.
std::string format_raster(const Eigen::VectorXd& values, int rows, int cols);

// Non-grid fallback: "node_id,priority" lines with a header.
std::string format_node_values(const Eigen::VectorXd& values);

// Intervention report: structured text with the converged cost, iteration
// count, budget use, and the target list (6 decimals). Parseable back.
std::string format_intervention_report(const InterventionResult& result,
                                       const std::vector<Target>& targets);
std::vector<Target> parse_intervention_report(const std::string& text);

// Control matrix listing: "src,dst,k" CSV at full precision (diagonal
// entries have src == dst). Parseable back for closed-loop simulation.
std::string format_control(const ControlMatrix& K);
ControlMatrix parse_control(const std::string& text, int n);

// Trajectory CSV with header t,x_0,...,x_{n-1}.
std::string format_trajectory(const Trajectory& traj);

// Tour CSV: "order,waypoint_id,x,y,payload_amount" rows then a
// "total_length,<value>" summary line.
std::string format_tour(const Tour& tour, const std::vector<Waypoint>& waypoints);

// Run manifest: "key = value" lines, one per parameter, sorted by key.
// Deliberately free of timestamps so identical runs are byte-identical.
std::string format_manifest(
    const std::vector<std::pair<std::string, std::string>>& entries);

// Reads a whole file / writes atomically-ish (write then rename is not
// needed here; commands precompute all content before any write).
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace firemap::io
