#include "firemap/surveillance.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace firemap {

namespace {

void check_inputs(const DynamicsMatrix& dyn, const Eigen::VectorXd& damage,
                  double discount) {
  if (damage.size() != dyn.n) {
    throw std::invalid_argument("damage weight vector size mismatch");
  }
  if ((damage.array() < 0.0).any()) {
    throw std::invalid_argument("damage weights must be nonnegative");
  }
  if (!std::isfinite(discount)) {
    throw std::invalid_argument("discount rate must be finite");
  }
  const double abscissa = spectral_abscissa(dyn);
  if (discount <= abscissa) {
    std::ostringstream msg;
    msg << "discount rate " << discount
        << " must exceed the spectral abscissa " << abscissa
        << " for the discounted damage to stay finite";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

PriorityMap priority_direct(const DynamicsMatrix& dyn,
                            const Eigen::VectorXd& damage, double discount) {
  check_inputs(dyn, damage, discount);
  const int n = dyn.n;

  // p solves (r I - A)^T p = C^T; p_i is the discounted damage that one unit
  // of ignition at node i eventually causes.
  Eigen::SparseMatrix<double> M(n, n);
  {
    Eigen::SparseMatrix<double> I(n, n);
    I.setIdentity();
    M = Eigen::SparseMatrix<double>((discount * I - dyn.A).transpose());
  }
  M.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("sparse factorization of (rI - A)^T failed");
  }
  Eigen::VectorXd p = lu.solve(damage);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("sparse solve for the priority map failed");
  }

  const double resid = (M * p - damage).lpNorm<Eigen::Infinity>();
  const double bound = 1e-8 * (1.0 + damage.lpNorm<Eigen::Infinity>());
  if (!(resid <= bound)) {
    std::ostringstream msg;
    msg << "priority solve residual " << resid << " exceeds bound " << bound;
    throw std::runtime_error(msg.str());
  }
  for (int i = 0; i < n; ++i) {
    if (p[i] < -1e-12) {
      throw std::runtime_error(
          "priority map came out negative; dynamics matrix is not a valid "
          "spread model");
    }
    p[i] = std::max(p[i], 0.0);
  }
  return PriorityMap{p, discount, false};
}

PriorityMap priority_lp(const DynamicsMatrix& dyn,
                        const Eigen::VectorXd& damage, double discount,
                        const lp::Solver& solver) {
  check_inputs(dyn, damage, discount);
  const int n = dyn.n;

  // minimize sum(p)  s.t.  A^T p - r p <= -C^T, p >= 0.
  // The optimum is the unique fixed point (rI - A)^T p = C^T.
  lp::Problem prob;
  prob.c = Eigen::VectorXd::Ones(n);
  prob.h = -damage;
  prob.upper = Eigen::VectorXd::Constant(n, lp::kInf);
  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();
  prob.G = Eigen::SparseMatrix<double>(dyn.A.transpose()) - discount * I;
  prob.G.makeCompressed();

  lp::Solution sol = solver.solve(prob);
  if (!sol.ok()) {
    throw std::runtime_error("priority LP failed: " + sol.message);
  }
  Eigen::VectorXd p = sol.x.cwiseMax(0.0);
  return PriorityMap{p, discount, false};
}

double min_discount(const DynamicsMatrix& dyn) { return spectral_abscissa(dyn); }

PriorityMap normalize(PriorityMap map) {
  const double top = map.p.size() ? map.p.maxCoeff() : 0.0;
  if (top > 0.0) map.p /= top;
  map.normalized = true;
  return map;
}

}  // namespace firemap
