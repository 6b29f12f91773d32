#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "firemap/dynamics.hpp"
#include "firemap/graph.hpp"
#include "firemap/simulate.hpp"

namespace {

firemap::SpreadGraph single_node(double delta) {
  firemap::SpreadGraph g;
  g.n = 1;
  g.nodes = {{delta, 1.0}};
  return g;
}

firemap::SpreadGraph two_node(double beta, double delta) {
  firemap::SpreadGraph g;
  g.n = 2;
  g.nodes = {{delta, 0.1}, {delta, 1.0}};
  g.edges = {{0, 1, beta}, {1, 0, beta}};
  return g;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<int>(v.size()));
  int k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("time grid is uniform with a short final remainder step") {
    auto g = single_node(0.0);
    firemap::SimConfig cfg;
    cfg.dt = 0.3;
    cfg.horizon = 1.0;
    auto traj = firemap::simulate_nonlinear(g, vec({0.5}), cfg);
    REQUIRE(traj.times.size() == 5);
    CHECK(traj.times[0] == doctest::Approx(0.0));
    CHECK(traj.times[1] == doctest::Approx(0.3));
    CHECK(traj.times[2] == doctest::Approx(0.6));
    CHECK(traj.times[3] == doctest::Approx(0.9));
    CHECK(traj.times[4] == doctest::Approx(1.0));
    CHECK(traj.states.size() == traj.times.size());

    cfg.dt = 0.25;  // divides evenly: no remainder step
    auto even = firemap::simulate_nonlinear(g, vec({0.5}), cfg);
    CHECK(even.times.size() == 5);
    CHECK(even.times.back() == doctest::Approx(1.0));
  }

  TEST_CASE("frozen dynamics leave the state unchanged") {
    auto g = two_node(0.0, 0.0);
    firemap::SimConfig cfg;
    cfg.dt = 0.1;
    cfg.horizon = 2.0;
    cfg.runs = 3;
    auto ca = firemap::simulate_ca(g, vec({1.0, 0.0}), cfg);
    for (const auto& s : ca.states) {
      CHECK(s[0] == 1.0);
      CHECK(s[1] == 0.0);
    }
    auto ode = firemap::simulate_nonlinear(g, vec({1.0, 0.0}), cfg);
    CHECK(ode.states.back()[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ode.states.back()[1] == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("ca single-node extinction matches the geometric law") {
    // With no edges, occupancy after k steps is Bernoulli with mean
    // (1 - delta*dt)^k; 10,000 replicates put the average within 3 sigma.
    auto g = single_node(0.5);
    firemap::SimConfig cfg;
    cfg.dt = 0.1;
    cfg.horizon = 1.0;
    cfg.seed = 42;
    cfg.runs = 10000;
    auto traj = firemap::simulate_ca(g, vec({1.0}), cfg);
    REQUIRE(traj.times.size() == 11);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      double mean = std::pow(1.0 - 0.05, static_cast<double>(k));
      double sigma = std::sqrt(mean * (1.0 - mean) / cfg.runs);
      CHECK(std::abs(traj.states[k][0] - mean) <= 3.0 * sigma + 1e-12);
    }
  }

  TEST_CASE("ca runs are deterministic given the seed") {
    auto g = two_node(0.5, 0.2);
    firemap::SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 1.0;
    cfg.seed = 7;
    cfg.runs = 50;
    auto a = firemap::simulate_ca(g, vec({1.0, 0.0}), cfg);
    auto b = firemap::simulate_ca(g, vec({1.0, 0.0}), cfg);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t k = 0; k < a.states.size(); ++k)
      CHECK((a.states[k] - b.states[k]).lpNorm<Eigen::Infinity>() == 0.0);

    cfg.seed = 8;
    auto c = firemap::simulate_ca(g, vec({1.0, 0.0}), cfg);
    double diff = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k)
      diff += (a.states[k] - c.states[k]).lpNorm<Eigen::Infinity>();
    CHECK(diff > 0.0);  // different seed, different sample path
  }

  TEST_CASE("ca average equals the mean of its replicates") {
    auto g = two_node(0.5, 0.2);
    firemap::SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 0.5;
    cfg.seed = 3;
    cfg.runs = 8;
    auto avg = firemap::simulate_ca(g, vec({1.0, 0.0}), cfg);
    for (std::size_t k = 0; k < avg.states.size(); ++k) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(2);
      for (int rep = 0; rep < cfg.runs; ++rep) {
        auto one = firemap::simulate_ca_replicate(g, vec({1.0, 0.0}), cfg, rep);
        acc += one.states[k];
      }
      acc /= cfg.runs;
      CHECK((avg.states[k] - acc).lpNorm<Eigen::Infinity>() <= 1e-15);
    }
  }

  TEST_CASE("ca replicates hold binary states") {
    auto g = two_node(0.5, 0.2);
    firemap::SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 1.0;
    cfg.seed = 11;
    auto one = firemap::simulate_ca_replicate(g, vec({1.0, 0.0}), cfg, 0);
    for (const auto& s : one.states)
      for (int i = 0; i < s.size(); ++i) CHECK((s[i] == 0.0 || s[i] == 1.0));
  }

  TEST_CASE("ca rejects steps that break the probability bound") {
    // Node 0 receives rate 0.5 + 0.5 (two in-edges) plus recovery 0.2:
    // total 1.2, so dt must be <= 1/1.2.
    firemap::SpreadGraph g;
    g.n = 3;
    g.nodes = {{0.2, 0.1}, {0.1, 0.1}, {0.1, 0.1}};
    g.edges = {{1, 0, 0.5}, {2, 0, 0.5}};
    CHECK(firemap::max_row_rate(g) == doctest::Approx(1.2).epsilon(1e-12));
    firemap::SimConfig cfg;
    cfg.dt = 0.9;
    cfg.horizon = 2.0;
    CHECK_THROWS_AS(firemap::simulate_ca(g, vec({0.0, 1.0, 1.0}), cfg),
                    std::invalid_argument);
    try {
      firemap::simulate_ca(g, vec({0.0, 1.0, 1.0}), cfg);
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("dt <=") != std::string::npos);
    }
    cfg.dt = 0.5;  // within 1/1.2
    CHECK_NOTHROW(firemap::simulate_ca(g, vec({0.0, 1.0, 1.0}), cfg));
  }

  TEST_CASE("ca requires a binary initial state") {
    auto g = two_node(0.5, 0.2);
    firemap::SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 0.5;
    CHECK_THROWS_AS(firemap::simulate_ca(g, vec({0.5, 0.0}), cfg),
                    std::invalid_argument);
  }

  TEST_CASE("mean-field zero state is a fixed point") {
    auto g = two_node(0.5, 0.2);
    firemap::SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 2.0;
    auto traj = firemap::simulate_nonlinear(g, vec({0.0, 0.0}), cfg);
    CHECK(traj.states.back().lpNorm<Eigen::Infinity>() == 0.0);
  }

  TEST_CASE("mean-field isolated node decays exponentially") {
    auto g = single_node(0.2);
    firemap::SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 3.0;
    auto traj = firemap::simulate_nonlinear(g, vec({1.0}), cfg);
    for (std::size_t k = 0; k < traj.times.size(); ++k)
      CHECK(traj.states[k][0] ==
            doctest::Approx(std::exp(-0.2 * traj.times[k])).epsilon(1e-6));
  }

  TEST_CASE("mean-field rk4 agrees with a fine euler integration") {
    auto g = two_node(0.5, 0.2);
    Eigen::VectorXd x0 = vec({1.0, 0.2});
    firemap::SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 2.0;
    auto traj = firemap::simulate_nonlinear(g, x0, cfg);

    // Reference: explicit Euler at dt/1000 (first-order error ~2e-5 here).
    Eigen::VectorXd x = x0;
    const double h = cfg.dt / 1000.0;
    auto deriv = [&](const Eigen::VectorXd& s) {
      Eigen::VectorXd d(2);
      d[0] = -0.2 * s[0] + (1.0 - s[0]) * 0.5 * s[1];
      d[1] = -0.2 * s[1] + (1.0 - s[1]) * 0.5 * s[0];
      return d;
    };
    std::size_t next = 0;
    for (int step = 0; step <= 40000; ++step) {
      double t = step * h;
      if (next < traj.times.size() && std::abs(t - traj.times[next]) < h / 2) {
        CHECK((x - traj.states[next]).lpNorm<Eigen::Infinity>() < 1e-4);
        ++next;
      }
      x += h * deriv(x);
    }
    CHECK(next == traj.times.size());
  }

  TEST_CASE("mean-field states stay inside the unit box") {
    auto g = firemap::grid16_fixture();
    firemap::SimConfig cfg;
    cfg.dt = 0.02;
    cfg.horizon = 5.0;
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(16);
    x0[0] = 1.0;
    auto traj = firemap::simulate_nonlinear(g, x0, cfg);
    for (const auto& s : traj.states) {
      CHECK(s.minCoeff() >= 0.0);
      CHECK(s.maxCoeff() <= 1.0);
    }
  }

  TEST_CASE("mean-field input validation") {
    auto g = two_node(0.5, 0.2);
    firemap::SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 1.0;
    CHECK_THROWS_AS(firemap::simulate_nonlinear(g, vec({1.2, 0.0}), cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(firemap::simulate_nonlinear(g, vec({-0.1, 0.0}), cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(firemap::simulate_nonlinear(g, vec({1.0}), cfg),
                    std::invalid_argument);
    cfg.dt = 1.0;  // above 0.1 / max_row_rate = 0.1/0.7
    CHECK_THROWS_AS(firemap::simulate_nonlinear(g, vec({1.0, 0.0}), cfg),
                    std::invalid_argument);
    cfg.dt = 0.05;
    cfg.horizon = -1.0;
    CHECK_THROWS_AS(firemap::simulate_nonlinear(g, vec({1.0, 0.0}), cfg),
                    std::invalid_argument);
  }

  TEST_CASE("linear single-mode decay is exact to rk4 order") {
    auto g = single_node(0.2);
    auto dyn = firemap::build_dynamics(g);
    firemap::SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 3.0;
    auto traj = firemap::simulate_linear(dyn, vec({1.0}), cfg);
    for (std::size_t k = 0; k < traj.times.size(); ++k)
      CHECK(traj.states[k][0] ==
            doctest::Approx(std::exp(-0.2 * traj.times[k])).epsilon(1e-8));
  }

  TEST_CASE("linear two-node flow matches the closed form") {
    // A = [[-d, b], [b, -d]] has solution components
    // e^{-dt} (cosh(bt) x0 + sinh(bt) x1) and symmetric.
    const double b = 0.5, d = 0.2;
    auto g = two_node(b, d);
    auto dyn = firemap::build_dynamics(g);
    firemap::SimConfig cfg;
    cfg.dt = 0.02;
    cfg.horizon = 2.0;
    auto traj = firemap::simulate_linear(dyn, vec({1.0, 0.0}), cfg);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      double t = traj.times[k];
      double e = std::exp(-d * t);
      CHECK(traj.states[k][0] == doctest::Approx(e * std::cosh(b * t)).epsilon(1e-6));
      CHECK(traj.states[k][1] == doctest::Approx(e * std::sinh(b * t)).epsilon(1e-6));
    }
  }

  TEST_CASE("linear simulation validates input") {
    auto g = two_node(0.5, 0.2);
    auto dyn = firemap::build_dynamics(g);
    firemap::SimConfig cfg;
    cfg.dt = 2.0;  // beyond the step bound
    cfg.horizon = 1.0;
    CHECK_THROWS_AS(firemap::simulate_linear(dyn, vec({1.0, 0.0}), cfg),
                    std::invalid_argument);
    cfg.dt = 0.05;
    CHECK_THROWS_AS(firemap::simulate_linear(dyn, vec({1.0}), cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(firemap::simulate_linear(dyn, vec({-0.5, 0.0}), cfg),
                    std::invalid_argument);
  }

  TEST_CASE("empirical cost integrates discounted exponential decay") {
    // x(t) = e^{-delta t}, C = 1: integral over [0, T] of e^{-(r+delta)t}
    // approaches 1/(r+delta) for large T.
    auto g = single_node(0.2);
    auto dyn = firemap::build_dynamics(g);
    firemap::SimConfig cfg;
    cfg.dt = 0.01;
    cfg.horizon = 40.0;
    auto traj = firemap::simulate_linear(dyn, vec({1.0}), cfg);
    double cost = firemap::empirical_cost(traj, vec({1.0}), 2.0);
    CHECK(cost == doctest::Approx(1.0 / 2.2).epsilon(1e-4));
  }

  TEST_CASE("empirical cost of the zero trajectory is zero") {
    auto g = two_node(0.5, 0.2);
    firemap::SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 1.0;
    auto traj = firemap::simulate_nonlinear(g, vec({0.0, 0.0}), cfg);
    CHECK(firemap::empirical_cost(traj, vec({0.1, 1.0}), 2.0) == 0.0);
  }

  TEST_CASE("empirical cost validates arguments") {
    auto g = single_node(0.2);
    auto dyn = firemap::build_dynamics(g);
    firemap::SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 1.0;
    auto traj = firemap::simulate_linear(dyn, vec({1.0}), cfg);
    CHECK_THROWS_AS(firemap::empirical_cost(traj, vec({1.0}), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(firemap::empirical_cost(traj, vec({1.0, 2.0}), 2.0),
                    std::invalid_argument);
  }

  TEST_CASE("max_row_rate sums inbound spread and recovery") {
    firemap::SpreadGraph g;
    g.n = 3;
    g.nodes = {{0.3, 0.1}, {0.1, 0.1}, {0.2, 0.1}};
    g.edges = {{1, 0, 0.4}, {2, 0, 0.25}, {0, 2, 0.1}};
    // Node 0: 0.3 + 0.4 + 0.25 = 0.95; node 2: 0.2 + 0.1 = 0.3.
    CHECK(firemap::max_row_rate(g) == doctest::Approx(0.95).epsilon(1e-12));
  }

  TEST_CASE("ca occupancy sits below the linear bound on average") {
    // Small pinned-seed check of the mean/bound ordering at visible times.
    auto g = two_node(0.4, 0.3);
    auto dyn = firemap::build_dynamics(g);
    firemap::SimConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 2.0;
    cfg.seed = 2026;
    cfg.runs = 4000;
    Eigen::VectorXd x0 = vec({1.0, 0.0});
    auto ca = firemap::simulate_ca(g, x0, cfg);
    auto lin = firemap::simulate_linear(dyn, x0, cfg);
    REQUIRE(ca.times.size() == lin.times.size());
    for (std::size_t k = 0; k < ca.times.size(); ++k) {
      if (ca.times[k] < 0.1) continue;
      double slack = 3.0 * std::sqrt(0.25 / cfg.runs);
      CHECK(ca.states[k][0] <= lin.states[k][0] + slack);
      CHECK(ca.states[k][1] <= lin.states[k][1] + slack);
    }
  }
}
