#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "firemap/dynamics.hpp"
#include "firemap/graph.hpp"

namespace firemap {

struct SimConfig {
  double dt = 0.01;
  double horizon = 1.0;
  std::uint64_t seed = 0;  // CA only
  int runs = 1;            // CA only
};

// Time-stamped state sequence. CA trajectories hold replicate-averaged
// occupancy in [0,1]; ODE trajectories hold real states.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
};

// Stochastic cellular automaton, synchronous updates: each burning node
// extinguishes with probability delta_i*dt and ignites each unburning
// out-neighbor with probability beta*dt (independent trials). Returns the
// occupancy averaged over cfg.runs replicates; replicate k draws from an RNG
// stream derived from (seed, k), so results are reproducible and independent
// of execution order. Requires binary x0 and dt small enough that
// delta_i*dt <= 1 and the total in-rate times dt is <= 1 for every node
// (the error message reports the required bound).
Trajectory simulate_ca(const SpreadGraph& graph, const Eigen::VectorXd& x0,
                       const SimConfig& cfg);

// Single CA replicate (binary states), same transition semantics.
Trajectory simulate_ca_replicate(const SpreadGraph& graph,
                                 const Eigen::VectorXd& x0,
                                 const SimConfig& cfg, int replicate);

// Mean-field ODE x_i' = -delta_i x_i + (1 - x_i) * sum_j beta(j->i) x_j,
// integrated by fixed-step RK4. Requires x0 in [0,1]^n and dt within the
// documented step bound dt <= 0.1 / max row rate; states stay in [0,1].
Trajectory simulate_nonlinear(const SpreadGraph& graph,
                              const Eigen::VectorXd& x0, const SimConfig& cfg);

// Linear ODE x' = A x (A may be a closed loop A - K), fixed-step RK4 under
// the same step bound; nonnegative initial states stay nonnegative up to
// round-off (clamped at -1e-9 relative).
Trajectory simulate_linear(const DynamicsMatrix& dyn, const Eigen::VectorXd& x0,
                           const SimConfig& cfg);

// Trapezoidal quadrature of exp(-r t) * C'x(t) over the trajectory. The
// truncated tail is bounded by exp(-r t_f) * C'x(t_f) / r when the state is
// non-expanding beyond t_f; choose the horizon so the bound is negligible.
double empirical_cost(const Trajectory& traj, const Eigen::VectorXd& C,
                      double r);

// Largest total inbound rate plus recovery over nodes; the RK4 step bound is
// 0.1 / this and the CA probability-validity bound is 1 / this.
double max_row_rate(const SpreadGraph& graph);

}  // namespace firemap
