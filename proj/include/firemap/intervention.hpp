#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "firemap/dynamics.hpp"
#include "firemap/graph.hpp"
#include "firemap/lp.hpp"
#include "firemap/surveillance.hpp"

namespace firemap {

// Total control resource: sum of all entries of K is bounded by gamma.
struct Budget {
  double gamma = 0.0;
};

enum class ControlMode { edges, nodes, both };

struct ControlEntry {
  int i = 0;  // row (destination; == j for diagonal entries)
  int j = 0;  // column (source)
  double value = 0.0;
};

// Sparse nonnegative control matrix K for the closed loop x' = (A - K) x.
// Edge entries reduce spreading rates (bounded by a_ij so A - K stays
// Metzler); diagonal entries add recovery.
struct ControlMatrix {
  int n = 0;
  ControlMode mode = ControlMode::edges;
  std::vector<ControlEntry> entries;  // sorted by (i, j)

  double total() const;
  Eigen::SparseMatrix<double> to_sparse() const;
};

struct InterventionResult {
  PriorityMap p;  // cost-to-go of the closed loop A - K (exact recompute)
  ControlMatrix K;
  int iterations = 0;
  std::vector<double> trace;  // LP objective sum(p) per iteration
  double budget_used = 0.0;   // sum of entries of the returned K
  bool converged = false;
  bool rescaled = false;  // true if K was scaled down to meet the budget
};

// Iterative linear-programming solve of the budget-constrained intervention:
// minimize sum(p) over (p, Q) subject to the closed-loop certificate rows
// p'A - r p' - 1'Q <= -C, the linearized budget sum(Q / p0) <= gamma, edge
// bounds q_ij <= p0_i a_ij, and q on the mode's pattern only; p0 starts at
// the surveillance solution and is updated toward each iterate (with damping
// when the step fails to contract) until p stabilizes. Returns K derived by
// the division k = q / p, edge entries clamped to a_ij, rescaled to the
// budget if the division overran it, and p recomputed exactly for A - K.
// Non-convergence within max_iter returns the best iterate flagged.
InterventionResult solve_intervention(const DynamicsMatrix& dyn,
                                      const Eigen::VectorXd& C, double r,
                                      Budget budget, ControlMode mode,
                                      double tol = 1e-6, int max_iter = 50,
                                      const lp::Solver& solver = lp::bundled_solver());

// One intervention target: an edge (src != dst) or a node (src == dst).
struct Target {
  int dst = 0;
  int src = 0;
  double amount = 0.0;
};

// Entries with value >= threshold * max entry, sorted descending by amount,
// ties broken by (i, j) lexicographic order. Empty K yields an empty list.
std::vector<Target> extract_targets(const ControlMatrix& K, double threshold);

// Applies K to a graph as rate reduction: beta(j->i) loses k_ij (floored at
// zero), delta_i gains k_ii. Used to close the loop in the simulators.
SpreadGraph apply_control(const SpreadGraph& graph, const ControlMatrix& K);

}  // namespace firemap
