#include "firemap/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace firemap {

DynamicsMatrix build_dynamics(const SpreadGraph& graph) {
  validate(graph);
  DynamicsMatrix dyn;
  dyn.n = graph.n;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(graph.edges.size() + graph.n);
  for (const Edge& e : graph.edges) {
    if (e.beta > 0.0) {
      triplets.emplace_back(e.dst, e.src, e.beta);
    }
  }
  for (int i = 0; i < graph.n; ++i) {
    triplets.emplace_back(i, i, -graph.nodes[i].delta);
  }
  dyn.A.resize(graph.n, graph.n);
  dyn.A.setFromTriplets(triplets.begin(), triplets.end());
  dyn.A.makeCompressed();
  return dyn;
}

double spectral_abscissa(const DynamicsMatrix& dyn) {
  const int n = dyn.n;
  if (n <= 0) {
    throw std::invalid_argument("dynamics matrix is empty");
  }
  double max_delta = 0.0;
  double max_beta = 0.0;
  for (int k = 0; k < dyn.A.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(dyn.A, k); it; ++it) {
      if (it.row() == it.col()) {
        max_delta = std::max(max_delta, -it.value());
      } else {
        max_beta = std::max(max_beta, it.value());
      }
    }
  }
  const double sigma = max_delta + max_beta;
  Eigen::SparseMatrix<double> B = dyn.A;
  for (int i = 0; i < n; ++i) {
    B.coeffRef(i, i) += sigma;
  }
  B.makeCompressed();

  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  const double tol = 1e-8;
  double lambda_prev = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    Eigen::VectorXd w = B * v;
    const double lambda = w.norm();
    if (lambda <= 1e-300) {
      return -sigma;  // zero shifted matrix: spectral radius 0
    }
    v = w / lambda;
    if (std::abs(lambda - lambda_prev) <= tol * (1.0 + lambda)) {
      const double resid = (B * v - lambda * v).lpNorm<Eigen::Infinity>();
      if (resid <= tol * std::max(1.0, lambda)) {
        return lambda - sigma;
      }
    }
    lambda_prev = lambda;
  }
  throw std::runtime_error(
      "spectral abscissa: power iteration did not certify convergence within "
      "10000 iterations");
}

}  // namespace firemap
