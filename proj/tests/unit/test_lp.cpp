#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "firemap/lp.hpp"

namespace {

firemap::lp::Problem make_problem(int vars, int rows) {
  firemap::lp::Problem p;
  p.c = Eigen::VectorXd::Zero(vars);
  p.G.resize(rows, vars);
  p.h = Eigen::VectorXd::Zero(rows);
  p.upper = Eigen::VectorXd::Constant(vars, firemap::lp::kInf);
  return p;
}

void set_row(firemap::lp::Problem& p, int row, const std::vector<double>& coeffs, double rhs) {
  for (int j = 0; j < static_cast<int>(coeffs.size()); ++j) {
    if (coeffs[j] != 0.0) p.G.coeffRef(row, j) = coeffs[j];
  }
  p.h[row] = rhs;
}

}  // namespace

TEST_SUITE("lp") {
  TEST_CASE("one variable, one binding constraint") {
    // min x  s.t.  -x <= -3, x >= 0   ->  x = 3
    auto p = make_problem(1, 1);
    p.c << 1.0;
    set_row(p, 0, {-1.0}, -3.0);
    auto sol = firemap::lp::bundled_solver().solve(p);
    REQUIRE(sol.ok());
    CHECK(sol.x[0] == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-7));
  }

  TEST_CASE("bounded variables with unique optimum") {
    // min -2x - y  s.t.  x + y <= 1.5, 0 <= x <= 1, 0 <= y <= 1
    // optimum at x = 1, y = 0.5, objective -2.5
    auto p = make_problem(2, 1);
    p.c << -2.0, -1.0;
    set_row(p, 0, {1.0, 1.0}, 1.5);
    p.upper << 1.0, 1.0;
    auto sol = firemap::lp::bundled_solver().solve(p);
    REQUIRE(sol.ok());
    CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(sol.x[1] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(sol.objective == doctest::Approx(-2.5).epsilon(1e-7));
  }

  TEST_CASE("equality via paired inequalities") {
    // min x  s.t.  x + y = 1 (two inequalities), x,y >= 0  ->  x = 0, y = 1
    auto p = make_problem(2, 2);
    p.c << 1.0, 0.0;
    set_row(p, 0, {1.0, 1.0}, 1.0);
    set_row(p, 1, {-1.0, -1.0}, -1.0);
    auto sol = firemap::lp::bundled_solver().solve(p);
    REQUIRE(sol.ok());
    CHECK(sol.x[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(sol.x[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.x[0] + sol.x[1] == doctest::Approx(1.0).epsilon(1e-7));
  }

  TEST_CASE("two-constraint blending problem") {
    // min 2x + 3y  s.t.  x + y >= 4, 2x + y >= 5, x,y >= 0.
    // The cheaper variable does all the work: x = 4, y = 0, objective 8.
    auto p = make_problem(2, 2);
    p.c << 2.0, 3.0;
    set_row(p, 0, {-1.0, -1.0}, -4.0);
    set_row(p, 1, {-2.0, -1.0}, -5.0);
    auto sol = firemap::lp::bundled_solver().solve(p);
    REQUIRE(sol.ok());
    CHECK(sol.x[0] == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(std::abs(sol.x[1]) <= 1e-6);
    CHECK(sol.objective == doctest::Approx(8.0).epsilon(1e-7));
  }

  TEST_CASE("optimum on a variable upper bound") {
    // min -x  s.t.  x <= 5 (row), x <= 2 (bound)  ->  x = 2
    auto p = make_problem(1, 1);
    p.c << -1.0;
    set_row(p, 0, {1.0}, 5.0);
    p.upper << 2.0;
    auto sol = firemap::lp::bundled_solver().solve(p);
    REQUIRE(sol.ok());
    CHECK(sol.x[0] == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(sol.objective == doctest::Approx(-2.0).epsilon(1e-7));
  }

  TEST_CASE("zero upper bound pins the variable") {
    // min -x - y  s.t.  x + y <= 3, x <= 0 (bound), y <= 1
    auto p = make_problem(2, 1);
    p.c << -1.0, -1.0;
    set_row(p, 0, {1.0, 1.0}, 3.0);
    p.upper << 0.0, 1.0;
    auto sol = firemap::lp::bundled_solver().solve(p);
    REQUIRE(sol.ok());
    CHECK(std::abs(sol.x[0]) <= 1e-9);
    CHECK(sol.x[1] == doctest::Approx(1.0).epsilon(1e-7));
  }

  TEST_CASE("negative upper bound is infeasible") {
    auto p = make_problem(1, 1);
    p.c << 1.0;
    set_row(p, 0, {1.0}, 1.0);
    p.upper << -0.5;
    auto sol = firemap::lp::bundled_solver().solve(p);
    CHECK(!sol.ok());
    CHECK(sol.status == firemap::lp::Status::infeasible);
  }

  TEST_CASE("infeasible constraint row is detected") {
    // x >= 0 and x <= -1 cannot both hold.
    auto p = make_problem(1, 1);
    p.c << 1.0;
    set_row(p, 0, {1.0}, -1.0);
    auto sol = firemap::lp::bundled_solver().solve(p);
    CHECK(!sol.ok());
    CHECK(sol.status == firemap::lp::Status::infeasible);
  }

  TEST_CASE("degenerate objective still returns a feasible point") {
    // min 0  s.t.  x + y <= 1: any feasible point is optimal.
    auto p = make_problem(2, 1);
    p.c << 0.0, 0.0;
    set_row(p, 0, {1.0, 1.0}, 1.0);
    auto sol = firemap::lp::bundled_solver().solve(p);
    REQUIRE(sol.ok());
    CHECK(sol.x[0] >= -1e-9);
    CHECK(sol.x[1] >= -1e-9);
    CHECK(sol.x[0] + sol.x[1] <= 1.0 + 1e-7);
  }

  TEST_CASE("redundant rows do not break the solve") {
    // Duplicate the binding row; normal equations stay solvable via regularization.
    auto p = make_problem(1, 3);
    p.c << 1.0;
    set_row(p, 0, {-1.0}, -3.0);
    set_row(p, 1, {-1.0}, -3.0);
    set_row(p, 2, {-1.0}, -2.0);
    auto sol = firemap::lp::bundled_solver().solve(p);
    REQUIRE(sol.ok());
    CHECK(sol.x[0] == doctest::Approx(3.0).epsilon(1e-6));
  }

  TEST_CASE("solver reports its name") {
    CHECK(!firemap::lp::bundled_solver().name().empty());
  }
}
