#pragma once

#include <Eigen/SparseCore>
#include <limits>
#include <string>

namespace firemap::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Linear program in the form
//   minimize    c' x
//   subject to  G x <= h,   0 <= x <= upper   (upper_j may be +inf).
struct Problem {
  Eigen::VectorXd c;
  Eigen::SparseMatrix<double> G;  // rows x vars
  Eigen::VectorXd h;
  Eigen::VectorXd upper;  // size vars; kInf where unbounded

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(h.size()); }
};

enum class Status { optimal, infeasible, iteration_limit, numerical_failure };

struct Solution {
  Status status = Status::numerical_failure;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  std::string message;

  bool ok() const { return status == Status::optimal; }
};

// Backend interface. Implementations must be deterministic for fixed input.
class Solver {
 public:
  virtual ~Solver() = default;
  virtual Solution solve(const Problem& problem) const = 0;
  virtual std::string name() const = 0;
};

// Bundled backend: Mehrotra predictor-corrector interior point method with
// variable upper bounds. Normal equations are factored sparsely; a Ruiz
// equilibration pass keeps badly scaled rows tame. Suitable for the sparse,
// moderately sized programs this toolkit produces (up to ~10^4 variables).
class InteriorPointSolver final : public Solver {
 public:
  struct Options {
    double tolerance = 1e-9;  // relative primal/dual/gap
    int max_iterations = 200;
  };

  InteriorPointSolver() = default;
  explicit InteriorPointSolver(const Options& options) : options_(options) {}

  Solution solve(const Problem& problem) const override;
  std::string name() const override { return "interior-point"; }

 private:
  Options options_;
};

// Shared default-constructed bundled backend.
const Solver& bundled_solver();

}  // namespace firemap::lp
