#include "firemap/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace firemap {

namespace {

void check_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw std::invalid_argument("dt must be positive");
  }
  if (!(cfg.horizon >= cfg.dt) || !std::isfinite(cfg.horizon)) {
    throw std::invalid_argument("horizon must be at least one step long");
  }
}

// Step schedule: uniform dt with one shorter final step when the horizon is
// not a multiple of dt.
std::vector<double> step_sizes(const SimConfig& cfg) {
  std::vector<double> steps;
  const long long full = static_cast<long long>(cfg.horizon / cfg.dt + 1e-9);
  steps.assign(static_cast<std::size_t>(full), cfg.dt);
  const double rest = cfg.horizon - double(full) * cfg.dt;
  if (rest > 1e-12 * cfg.dt) steps.push_back(rest);
  return steps;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Replicate k draws from a generator seeded by splitmix64(seed, k): identical
// results regardless of replicate execution order.
std::mt19937_64 replicate_rng(std::uint64_t seed, int replicate) {
  std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL *
                                   (static_cast<std::uint64_t>(replicate) + 1);
  return std::mt19937_64(splitmix64(state));
}

double canonical_uniform(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

void check_ca_validity(const SpreadGraph& graph, const SimConfig& cfg) {
  const double rate = max_row_rate(graph);
  if (rate * cfg.dt > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "dt=" << cfg.dt << " makes transition probabilities exceed 1; "
        << "this graph requires dt <= " << 1.0 / rate;
    throw std::invalid_argument(msg.str());
  }
}

void check_binary(const Eigen::VectorXd& x0, int n) {
  if (x0.size() != n) {
    throw std::invalid_argument("initial state size mismatch");
  }
  for (int i = 0; i < n; ++i) {
    if (x0[i] != 0.0 && x0[i] != 1.0) {
      throw std::invalid_argument("initial state must be binary for the CA");
    }
  }
}

void ca_run(const SpreadGraph& graph, const Eigen::VectorXd& x0,
            const SimConfig& cfg, int replicate,
            std::vector<Eigen::VectorXd>& accum) {
  const int n = graph.n;
  std::mt19937_64 rng = replicate_rng(cfg.seed, replicate);
  std::vector<char> burning(n), next(n);
  for (int i = 0; i < n; ++i) burning[i] = x0[i] == 1.0;

  const std::vector<double> steps = step_sizes(cfg);
  for (int i = 0; i < n; ++i) accum[0][i] += burning[i];
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const double dt = steps[s];
    next = burning;
    for (int i = 0; i < n; ++i) {
      if (burning[i] && canonical_uniform(rng) < graph.nodes[i].delta * dt) {
        next[i] = 0;
      }
    }
    for (const Edge& e : graph.edges) {
      if (burning[e.src] && !burning[e.dst] &&
          canonical_uniform(rng) < e.beta * dt) {
        next[e.dst] = 1;
      }
    }
    burning.swap(next);
    for (int i = 0; i < n; ++i) accum[s + 1][i] += burning[i];
  }
}

std::vector<double> sample_times(const SimConfig& cfg) {
  const std::vector<double> steps = step_sizes(cfg);
  std::vector<double> times(steps.size() + 1, 0.0);
  for (std::size_t s = 0; s < steps.size(); ++s) {
    times[s + 1] = times[s] + steps[s];
  }
  return times;
}

}  // namespace

double max_row_rate(const SpreadGraph& graph) {
  validate(graph);
  std::vector<double> rate(graph.n, 0.0);
  for (int i = 0; i < graph.n; ++i) rate[i] = graph.nodes[i].delta;
  for (const Edge& e : graph.edges) rate[e.dst] += e.beta;
  double top = 0.0;
  for (double v : rate) top = std::max(top, v);
  return top;
}

Trajectory simulate_ca(const SpreadGraph& graph, const Eigen::VectorXd& x0,
                       const SimConfig& cfg) {
  check_config(cfg);
  check_binary(x0, graph.n);
  check_ca_validity(graph, cfg);
  if (cfg.runs < 1) throw std::invalid_argument("runs must be at least 1");

  Trajectory traj;
  traj.times = sample_times(cfg);
  std::vector<Eigen::VectorXd> accum(traj.times.size(),
                                     Eigen::VectorXd::Zero(graph.n));
  for (int k = 0; k < cfg.runs; ++k) {
    ca_run(graph, x0, cfg, k, accum);
  }
  traj.states.reserve(accum.size());
  for (auto& v : accum) traj.states.push_back(v / double(cfg.runs));
  return traj;
}

Trajectory simulate_ca_replicate(const SpreadGraph& graph,
                                 const Eigen::VectorXd& x0,
                                 const SimConfig& cfg, int replicate) {
  check_config(cfg);
  check_binary(x0, graph.n);
  check_ca_validity(graph, cfg);
  if (replicate < 0) throw std::invalid_argument("replicate must be >= 0");

  Trajectory traj;
  traj.times = sample_times(cfg);
  std::vector<Eigen::VectorXd> accum(traj.times.size(),
                                     Eigen::VectorXd::Zero(graph.n));
  ca_run(graph, x0, cfg, replicate, accum);
  traj.states.assign(accum.begin(), accum.end());
  return traj;
}

Trajectory simulate_nonlinear(const SpreadGraph& graph,
                              const Eigen::VectorXd& x0,
                              const SimConfig& cfg) {
  check_config(cfg);
  if (x0.size() != graph.n) {
    throw std::invalid_argument("initial state size mismatch");
  }
  if ((x0.array() < 0.0).any() || (x0.array() > 1.0).any()) {
    throw std::invalid_argument("initial state must lie in [0,1]");
  }
  const double rate = max_row_rate(graph);
  if (rate > 0.0 && cfg.dt > 0.1 / rate + 1e-12) {
    std::ostringstream msg;
    msg << "dt=" << cfg.dt << " exceeds the stability bound 0.1/max rate = "
        << 0.1 / rate;
    throw std::invalid_argument(msg.str());
  }

  // x_i' = -delta_i x_i + (1 - x_i) sum_j beta(j->i) x_j
  auto deriv = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd inflow = Eigen::VectorXd::Zero(graph.n);
    for (const Edge& e : graph.edges) inflow[e.dst] += e.beta * x[e.src];
    Eigen::VectorXd dx(graph.n);
    for (int i = 0; i < graph.n; ++i) {
      dx[i] = -graph.nodes[i].delta * x[i] + (1.0 - x[i]) * inflow[i];
    }
    return dx;
  };

  Trajectory traj;
  traj.times = sample_times(cfg);
  traj.states.reserve(traj.times.size());
  Eigen::VectorXd x = x0;
  traj.states.push_back(x);
  for (double dt : step_sizes(cfg)) {
    const Eigen::VectorXd k1 = deriv(x);
    const Eigen::VectorXd k2 = deriv(x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = deriv(x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = deriv(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    for (int i = 0; i < graph.n; ++i) {
      if (x[i] < -1e-6 || x[i] > 1.0 + 1e-6) {
        throw std::runtime_error(
            "mean-field integration left [0,1]; reduce the step size");
      }
      x[i] = std::clamp(x[i], 0.0, 1.0);
    }
    traj.states.push_back(x);
  }
  return traj;
}

Trajectory simulate_linear(const DynamicsMatrix& dyn, const Eigen::VectorXd& x0,
                           const SimConfig& cfg) {
  check_config(cfg);
  if (x0.size() != dyn.n) {
    throw std::invalid_argument("initial state size mismatch");
  }
  if ((x0.array() < 0.0).any()) {
    throw std::invalid_argument("initial state must be nonnegative");
  }
  // Gershgorin bound on the dominant eigenvalue from absolute row sums.
  Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(dyn.n);
  for (int col = 0; col < dyn.A.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(dyn.A, col); it; ++it) {
      row_sum[it.row()] += std::abs(it.value());
    }
  }
  const double rate = row_sum.size() ? row_sum.maxCoeff() : 0.0;
  if (rate > 0.0 && cfg.dt > 0.1 / rate + 1e-12) {
    std::ostringstream msg;
    msg << "dt=" << cfg.dt << " exceeds the stability bound 0.1/max rate = "
        << 0.1 / rate;
    throw std::invalid_argument(msg.str());
  }

  Trajectory traj;
  traj.times = sample_times(cfg);
  traj.states.reserve(traj.times.size());
  Eigen::VectorXd x = x0;
  traj.states.push_back(x);
  for (double dt : step_sizes(cfg)) {
    const Eigen::VectorXd k1 = dyn.A * x;
    const Eigen::VectorXd k2 = dyn.A * (x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = dyn.A * (x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = dyn.A * (x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    for (int i = 0; i < dyn.n; ++i) {
      if (x[i] < 0.0) {
        if (x[i] < -1e-9 * std::max(1.0, x.cwiseAbs().maxCoeff())) {
          throw std::runtime_error(
              "linear integration produced a negative state; reduce the step "
              "size");
        }
        x[i] = 0.0;
      }
    }
    traj.states.push_back(x);
  }
  return traj;
}

double empirical_cost(const Trajectory& traj, const Eigen::VectorXd& C,
                      double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("discount rate must be positive");
  }
  if (traj.times.size() != traj.states.size() || traj.times.empty()) {
    throw std::invalid_argument("trajectory is empty or inconsistent");
  }
  if (traj.states.front().size() != C.size()) {
    throw std::invalid_argument("damage weight size mismatch");
  }
  // Truncation: the discarded tail is below exp(-r t_f) C'x(t_f) / r when the
  // state does not grow past the horizon.
  double total = 0.0;
  double prev = std::exp(-r * traj.times[0]) * C.dot(traj.states[0]);
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    const double cur = std::exp(-r * traj.times[k]) * C.dot(traj.states[k]);
    total += 0.5 * (prev + cur) * (traj.times[k] - traj.times[k - 1]);
    prev = cur;
  }
  return total;
}

}  // namespace firemap
