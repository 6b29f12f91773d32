#pragma once

#include <Eigen/Dense>

#include "firemap/dynamics.hpp"
#include "firemap/lp.hpp"

namespace firemap {

// Nonnegative per-node discounted cost-to-go, with the discount rate it was
// computed under. p_i weights the future cost of an outbreak starting at i.
struct PriorityMap {
  Eigen::VectorXd p;
  double r = 0.0;
  bool normalized = false;
};

// Solves (rI - A)' p = C' by sparse LU. Requires r > spectral_abscissa(A)
// (checked; the error message reports the computed abscissa) and C >= 0.
// Residual bounded by 1e-8 * (1 + max|C|); round-off negatives above -1e-12
// are clamped to zero, anything more negative is a hard error.
PriorityMap priority_direct(const DynamicsMatrix& dyn, const Eigen::VectorXd& C,
                            double r);

// Equivalent linear program: minimize sum(p) subject to p >= 0 and
// p'A - r p' <= -C. Matches priority_direct within 1e-6 elementwise.
PriorityMap priority_lp(const DynamicsMatrix& dyn, const Eigen::VectorXd& C,
                        double r, const lp::Solver& solver = lp::bundled_solver());

// Minimal feasible discount rate: the spectral abscissa of A. priority_direct
// succeeds for any r meaningfully above this and fails at or below it.
double min_discount(const DynamicsMatrix& dyn);

// Scales p by 1/max(p) (all-zero maps pass through) and sets the flag.
PriorityMap normalize(PriorityMap map);

}  // namespace firemap
