#pragma once

#include <Eigen/SparseCore>

#include "firemap/graph.hpp"

namespace firemap {

// Sparse Metzler state matrix of the linearized spreading dynamics
// x' = A x. Entry (i, j), i != j, holds the rate of edge j -> i
// (column = source, row = destination); entry (i, i) holds -delta_i.
struct DynamicsMatrix {
  int n = 0;
  Eigen::SparseMatrix<double> A;  // n x n, compressed

  double entry(int i, int j) const { return A.coeff(i, j); }
};

// Builds the dynamics matrix from a validated graph.
DynamicsMatrix build_dynamics(const SpreadGraph& graph);

// Maximum real part over the eigenvalues of A. For a Metzler matrix this is
// the dominant (Perron) eigenvalue of the nonnegative shift A + sigma*I minus
// sigma. Computed by power iteration with sigma = max delta + max beta (the
// extra beta term keeps the shifted matrix primitive on bipartite graphs);
// tolerance 1e-8, at most 10,000 iterations. Throws std::runtime_error if the
// iteration fails to certify the residual within the cap.
double spectral_abscissa(const DynamicsMatrix& dyn);

}  // namespace firemap
