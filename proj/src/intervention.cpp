#include "firemap/intervention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace firemap {

namespace {

constexpr double kEpsPrice = 1e-12;  // below this a price is treated as zero

struct PatternEntry {
  int i = 0;       // row (destination; == j for a diagonal entry)
  int j = 0;       // column (source)
  double a = 0.0;  // A[i][j] for i != j; unused for diagonals
};

std::vector<PatternEntry> build_pattern(const DynamicsMatrix& dyn,
                                        ControlMode mode) {
  std::vector<PatternEntry> pattern;
  if (mode == ControlMode::edges || mode == ControlMode::both) {
    for (int col = 0; col < dyn.A.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(dyn.A, col); it;
           ++it) {
        if (it.row() != it.col() && it.value() > 0.0) {
          pattern.push_back({static_cast<int>(it.row()),
                             static_cast<int>(it.col()), it.value()});
        }
      }
    }
    std::sort(pattern.begin(), pattern.end(),
              [](const PatternEntry& a, const PatternEntry& b) {
                return a.i != b.i ? a.i < b.i : a.j < b.j;
              });
  }
  if (mode == ControlMode::nodes || mode == ControlMode::both) {
    for (int i = 0; i < dyn.n; ++i) pattern.push_back({i, i, 0.0});
  }
  return pattern;
}

}  // namespace

double ControlMatrix::total() const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.value;
  return sum;
}

Eigen::SparseMatrix<double> ControlMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(entries.size());
  for (const auto& e : entries) trip.emplace_back(e.i, e.j, e.value);
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

InterventionResult solve_intervention(const DynamicsMatrix& dyn,
                                      const Eigen::VectorXd& C, double r,
                                      Budget budget, ControlMode mode,
                                      double tol, int max_iter,
                                      const lp::Solver& solver) {
  if (!(budget.gamma >= 0.0) || !std::isfinite(budget.gamma)) {
    throw std::invalid_argument("budget must be finite and nonnegative");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("tolerance must be positive");
  }
  if (max_iter < 1) {
    throw std::invalid_argument("max_iter must be at least 1");
  }

  const int n = dyn.n;
  const double gamma = budget.gamma;
  const PriorityMap surveillance = priority_direct(dyn, C, r);

  const std::vector<PatternEntry> pattern =
      gamma > 0.0 ? build_pattern(dyn, mode) : std::vector<PatternEntry>{};
  const int m = static_cast<int>(pattern.size());

  Eigen::VectorXd p0 = surveillance.p;
  Eigen::VectorXd p_prev = surveillance.p;
  Eigen::VectorXd p_lp = surveillance.p;
  Eigen::VectorXd q = Eigen::VectorXd::Zero(m);
  std::vector<double> trace;
  double delta_prev = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;

  for (int iter = 1; iter <= max_iter; ++iter) {
    // Certificate rows 0..n-1, budget row n, per-entry cut rows n+1..n+m.
    const int nrow = n + 1 + m;
    lp::Problem prob;
    prob.c = Eigen::VectorXd::Zero(n + m);
    prob.c.head(n).setOnes();
    prob.h = Eigen::VectorXd::Zero(nrow);
    prob.h.head(n) = -C;
    prob.h[n] = gamma;
    prob.upper = Eigen::VectorXd::Constant(n + m, lp::kInf);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(dyn.A.nonZeros() + n + 3 * m);
    for (int col = 0; col < dyn.A.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(dyn.A, col); it;
           ++it) {
        // Certificate row `col`: sum_i A[i][col] p_i - r p_col + ...
        trip.emplace_back(col, static_cast<int>(it.row()), it.value());
      }
    }
    for (int j = 0; j < n; ++j) trip.emplace_back(j, j, -r);
    for (int k = 0; k < m; ++k) {
      const PatternEntry& e = pattern[k];
      trip.emplace_back(e.j, n + k, -1.0);  // control relieves column j's row
      if (p0[e.i] <= kEpsPrice) {
        prob.upper[n + k] = 0.0;  // zero price: no budget can buy anything here
      } else {
        trip.emplace_back(n, n + k, 1.0 / p0[e.i]);
        if (e.i != e.j) prob.upper[n + k] = p0[e.i] * e.a;
      }
      // q_k <= gamma p_i keeps the later division k = q / p bounded.
      trip.emplace_back(n + 1 + k, n + k, 1.0);
      trip.emplace_back(n + 1 + k, e.i, -gamma);
    }
    prob.G.resize(nrow, n + m);
    prob.G.setFromTriplets(trip.begin(), trip.end());
    prob.G.makeCompressed();

    lp::Solution sol = solver.solve(prob);
    if (!sol.ok()) {
      throw std::runtime_error("intervention LP failed at outer iteration " +
                               std::to_string(iter) + ": " + sol.message);
    }
    p_lp = sol.x.head(n);
    q = sol.x.tail(m);
    trace.push_back(p_lp.sum());
    iterations = iter;

    const double delta = (p_lp - p_prev).lpNorm<Eigen::Infinity>();
    if (delta <= tol * (1.0 + p_prev.lpNorm<Eigen::Infinity>())) {
      converged = true;
      break;
    }
    if (delta > 0.5 * delta_prev) {
      p0 = 0.5 * (p0 + p_lp);  // damp when the step fails to contract
    } else {
      p0 = p_lp;
    }
    p_prev = p_lp;
    delta_prev = delta;
  }

  ControlMatrix K;
  K.n = n;
  K.mode = mode;
  for (int k = 0; k < m; ++k) {
    if (q[k] > 1e-12) {
      const PatternEntry& e = pattern[k];
      if (p_lp[e.i] <= kEpsPrice) {
        throw std::runtime_error(
            "degenerate division: control bought at a zero-priority node");
      }
      double value = q[k] / p_lp[e.i];
      if (e.i != e.j) value = std::min(value, e.a);
      K.entries.push_back({e.i, e.j, value});
    }
  }
  std::sort(K.entries.begin(), K.entries.end(),
            [](const ControlEntry& a, const ControlEntry& b) {
              return a.i != b.i ? a.i < b.i : a.j < b.j;
            });

  bool rescaled = false;
  const double tot = K.total();
  if (tot > gamma * (1.0 + 1e-6)) {
    const double scale = gamma / tot;
    for (auto& e : K.entries) e.value *= scale;
    rescaled = true;
  }

  DynamicsMatrix closed{n, dyn.A - K.to_sparse()};
  closed.A.makeCompressed();
  PriorityMap p_final = priority_direct(closed, C, r);

  InterventionResult result;
  result.p = p_final;
  result.K = std::move(K);
  result.iterations = iterations;
  result.trace = std::move(trace);
  result.budget_used = result.K.total();
  result.converged = converged;
  result.rescaled = rescaled;
  return result;
}

std::vector<Target> extract_targets(const ControlMatrix& K, double threshold) {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw std::invalid_argument("threshold must be finite and nonnegative");
  }
  double top = 0.0;
  for (const auto& e : K.entries) top = std::max(top, e.value);
  std::vector<Target> targets;
  for (const auto& e : K.entries) {
    if (e.value > 0.0 && e.value >= threshold * top) {
      targets.push_back({e.i, e.j, e.value});
    }
  }
  std::sort(targets.begin(), targets.end(), [](const Target& a, const Target& b) {
    if (a.amount != b.amount) return a.amount > b.amount;
    return a.dst != b.dst ? a.dst < b.dst : a.src < b.src;
  });
  return targets;
}

SpreadGraph apply_control(const SpreadGraph& graph, const ControlMatrix& K) {
  if (K.n != graph.n) {
    throw std::invalid_argument("control matrix size does not match graph");
  }
  SpreadGraph out = graph;
  for (const auto& e : K.entries) {
    if (e.value < 0.0) {
      throw std::invalid_argument("control entries must be nonnegative");
    }
    if (e.i == e.j) {
      out.nodes[e.i].delta += e.value;
      continue;
    }
    bool found = false;
    for (auto& edge : out.edges) {
      if (edge.src == e.j && edge.dst == e.i) {
        edge.beta = std::max(edge.beta - e.value, 0.0);
        found = true;
        break;
      }
    }
    if (!found && e.value > 0.0) {
      throw std::invalid_argument(
          "control entry targets an edge absent from the graph");
    }
  }
  return out;
}

}  // namespace firemap
