#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "firemap/dynamics.hpp"
#include "firemap/graph.hpp"
#include "firemap/surveillance.hpp"

namespace {

firemap::SpreadGraph single_node(double delta, double cost) {
  firemap::SpreadGraph g;
  g.n = 1;
  g.nodes = {{delta, cost}};
  return g;
}

// Two nodes, mutual spreading 0.5/0.3, recovery 0.2, costs 0.1 and 1.0.
firemap::SpreadGraph two_node() {
  firemap::SpreadGraph g;
  g.n = 2;
  g.nodes = {{0.2, 0.1}, {0.2, 1.0}};
  g.edges = {{0, 1, 0.5}, {1, 0, 0.3}};
  return g;
}

Eigen::VectorXd costs_of(const firemap::SpreadGraph& g) {
  Eigen::VectorXd c(g.n);
  for (int i = 0; i < g.n; ++i) c[i] = g.nodes[i].cost;
  return c;
}

// Dense oracle: solve (rI - A)^T p = C with full-pivot LU.
Eigen::VectorXd dense_priority(const firemap::DynamicsMatrix& dyn,
                               const Eigen::VectorXd& C, double r) {
  Eigen::MatrixXd M = Eigen::MatrixXd(dyn.A);
  Eigen::MatrixXd lhs =
      (r * Eigen::MatrixXd::Identity(dyn.n, dyn.n) - M).transpose();
  return lhs.fullPivLu().solve(C);
}

std::mt19937_64 rng_for(int k) { return std::mt19937_64(9000 + 37 * k); }

firemap::SpreadGraph random_graph(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  firemap::SpreadGraph g;
  g.n = n;
  for (int i = 0; i < n; ++i)
    g.nodes.push_back({0.1 + 0.4 * unit(rng), 0.05 + unit(rng)});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && unit(rng) < 0.3) g.edges.push_back({i, j, 0.1 + 0.6 * unit(rng)});
  return g;
}

}  // namespace

TEST_SUITE("surveillance") {
  TEST_CASE("single node has closed-form priority c/(r+delta)") {
    auto dyn = firemap::build_dynamics(single_node(0.2, 1.0));
    Eigen::VectorXd C(1);
    C << 1.0;
    auto map = firemap::priority_direct(dyn, C, 2.0);
    CHECK(map.p[0] == doctest::Approx(1.0 / 2.2).epsilon(1e-12));
    CHECK(map.r == 2.0);
    CHECK(!map.normalized);
  }

  TEST_CASE("two-node priorities match Cramer's rule") {
    // (rI - A)^T p = C with A = [[-0.2, 0.3], [0.5, -0.2]], r = 2:
    //   [2.2, -0.5; -0.3, 2.2] p = [0.1, 1.0], det = 4.84 - 0.15 = 4.69.
    auto g = two_node();
    auto dyn = firemap::build_dynamics(g);
    auto map = firemap::priority_direct(dyn, costs_of(g), 2.0);
    const double det = 2.2 * 2.2 - 0.5 * 0.3;
    CHECK(map.p[0] == doctest::Approx((0.1 * 2.2 + 0.5 * 1.0) / det).epsilon(1e-12));
    CHECK(map.p[1] == doctest::Approx((2.2 * 1.0 + 0.3 * 0.1) / det).epsilon(1e-12));
  }

  TEST_CASE("grid16 ranking puts the asset's sole neighbor first") {
    auto g = firemap::grid16_fixture();
    auto dyn = firemap::build_dynamics(g);
    auto map = firemap::priority_direct(dyn, costs_of(g), 2.0);
    REQUIRE(map.p.size() == 16);
    // Node 15 is the costly asset; node 10 is its only neighbor and must
    // outrank every other node including the asset itself.
    int argmax = 0;
    for (int i = 1; i < 16; ++i)
      if (map.p[i] > map.p[argmax]) argmax = i;
    CHECK(argmax == 10);
    CHECK(map.p[10] > map.p[15]);
    // Diagonal-chain node 5 beats the off-chain interior nodes.
    CHECK(map.p[5] > map.p[6]);
    CHECK(map.p[5] > map.p[9]);
    // Symmetry of the grid+chain about the main diagonal: 6 and 9 tie.
    CHECK(map.p[6] == doctest::Approx(map.p[9]).epsilon(1e-10));
  }

  TEST_CASE("direct solve matches the dense oracle on random graphs") {
    for (int k = 0; k < 10; ++k) {
      auto rng = rng_for(k);
      std::uniform_int_distribution<int> size(2, 25);
      auto g = random_graph(rng, size(rng));
      auto dyn = firemap::build_dynamics(g);
      double r = firemap::min_discount(dyn) + 0.5;
      auto map = firemap::priority_direct(dyn, costs_of(g), r);
      Eigen::VectorXd oracle = dense_priority(dyn, costs_of(g), r);
      REQUIRE(map.p.size() == oracle.size());
      for (int i = 0; i < g.n; ++i)
        CHECK(map.p[i] == doctest::Approx(oracle[i]).epsilon(1e-9));
    }
  }

  TEST_CASE("linear program reproduces the direct solve") {
    std::vector<firemap::SpreadGraph> cases = {single_node(0.2, 1.0), two_node(),
                                               firemap::grid16_fixture()};
    for (const auto& g : cases) {
      auto dyn = firemap::build_dynamics(g);
      auto direct = firemap::priority_direct(dyn, costs_of(g), 2.0);
      auto lp = firemap::priority_lp(dyn, costs_of(g), 2.0);
      REQUIRE(lp.p.size() == direct.p.size());
      for (int i = 0; i < g.n; ++i)
        CHECK(lp.p[i] == doctest::Approx(direct.p[i]).epsilon(1e-6));
    }
  }

  TEST_CASE("linear program matches direct on random instances") {
    for (int k = 0; k < 5; ++k) {
      auto rng = rng_for(100 + k);
      std::uniform_int_distribution<int> size(2, 15);
      auto g = random_graph(rng, size(rng));
      auto dyn = firemap::build_dynamics(g);
      double r = firemap::min_discount(dyn) + 0.4;
      auto direct = firemap::priority_direct(dyn, costs_of(g), r);
      auto lp = firemap::priority_lp(dyn, costs_of(g), r);
      double scale = 1.0 + direct.p.lpNorm<Eigen::Infinity>();
      for (int i = 0; i < g.n; ++i)
        CHECK(std::abs(lp.p[i] - direct.p[i]) <= 1e-6 * scale);
    }
  }

  TEST_CASE("any feasible certificate dominates the solved priorities") {
    // If q satisfies q >= 0 and A^T q - r q <= -C then q >= p* componentwise.
    // Construct feasible points as q = p* + (rI - A)^{-T} w for random w >= 0.
    auto g = firemap::grid16_fixture();
    auto dyn = firemap::build_dynamics(g);
    double r = 2.0;
    auto base = firemap::priority_direct(dyn, costs_of(g), r);
    auto rng = rng_for(777);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
      Eigen::VectorXd w(g.n);
      for (int i = 0; i < g.n; ++i) w[i] = unit(rng);
      Eigen::VectorXd q = base.p + dense_priority(dyn, w, r);
      for (int i = 0; i < g.n; ++i) CHECK(q[i] >= base.p[i] - 1e-9);
    }
  }

  TEST_CASE("discount rate at or below the abscissa is rejected") {
    auto g = two_node();
    auto dyn = firemap::build_dynamics(g);
    // Abscissa of [[-0.2, 0.3],[0.5, -0.2]] is -0.2 + sqrt(0.15) ~ 0.18730.
    const double abscissa = -0.2 + std::sqrt(0.15);
    CHECK(firemap::min_discount(dyn) == doctest::Approx(abscissa).epsilon(1e-7));
    CHECK_NOTHROW(firemap::priority_direct(dyn, costs_of(g), abscissa + 1e-3));
    CHECK_THROWS_AS(firemap::priority_direct(dyn, costs_of(g), abscissa),
                    std::invalid_argument);
    CHECK_THROWS_AS(firemap::priority_direct(dyn, costs_of(g), abscissa - 0.01),
                    std::invalid_argument);
    try {
      firemap::priority_direct(dyn, costs_of(g), 0.1);
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("abscissa") != std::string::npos);
    }
  }

  TEST_CASE("input validation") {
    auto g = two_node();
    auto dyn = firemap::build_dynamics(g);
    Eigen::VectorXd wrong(3);
    wrong << 1.0, 1.0, 1.0;
    CHECK_THROWS_AS(firemap::priority_direct(dyn, wrong, 2.0), std::invalid_argument);
    Eigen::VectorXd negative(2);
    negative << -0.1, 1.0;
    CHECK_THROWS_AS(firemap::priority_direct(dyn, negative, 2.0),
                    std::invalid_argument);
    Eigen::VectorXd fine(2);
    fine << 0.1, 1.0;
    CHECK_THROWS_AS(
        firemap::priority_direct(dyn, fine, std::numeric_limits<double>::infinity()),
        std::invalid_argument);
  }

  TEST_CASE("priorities shrink as the discount rate grows") {
    auto g = firemap::grid16_fixture();
    auto dyn = firemap::build_dynamics(g);
    auto lo = firemap::priority_direct(dyn, costs_of(g), 1.8);
    auto hi = firemap::priority_direct(dyn, costs_of(g), 3.0);
    for (int i = 0; i < g.n; ++i) CHECK(hi.p[i] < lo.p[i]);
  }

  TEST_CASE("priorities grow with costs") {
    auto g = firemap::grid16_fixture();
    auto dyn = firemap::build_dynamics(g);
    Eigen::VectorXd c = costs_of(g);
    auto base = firemap::priority_direct(dyn, c, 2.0);
    Eigen::VectorXd bumped = c;
    bumped[3] += 0.5;
    auto more = firemap::priority_direct(dyn, bumped, 2.0);
    // Raising one cost cannot lower any priority, and strictly raises the
    // priority of the bumped node.
    for (int i = 0; i < g.n; ++i) CHECK(more.p[i] >= base.p[i] - 1e-12);
    CHECK(more.p[3] > base.p[3]);
  }

  TEST_CASE("normalize scales the peak to one") {
    auto g = firemap::grid16_fixture();
    auto dyn = firemap::build_dynamics(g);
    auto map = firemap::normalize(firemap::priority_direct(dyn, costs_of(g), 2.0));
    CHECK(map.normalized);
    CHECK(map.p.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(map.p.minCoeff() >= 0.0);

    firemap::PriorityMap zero;
    zero.p = Eigen::VectorXd::Zero(3);
    auto z = firemap::normalize(zero);
    CHECK(z.normalized);
    CHECK(z.p.maxCoeff() == 0.0);
  }

  TEST_CASE("min_discount equals the spectral abscissa") {
    auto g = firemap::grid16_fixture();
    auto dyn = firemap::build_dynamics(g);
    CHECK(firemap::min_discount(dyn) ==
          doctest::Approx(firemap::spectral_abscissa(dyn)).epsilon(1e-12));
  }
}
