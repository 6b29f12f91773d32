#include "firemap/lp.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace firemap::lp {

namespace {

using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

double inf_norm(const VectorXd& v) {
  return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0;
}

// Largest step alpha in [0, 1] keeping v + alpha*dv strictly positive.
double max_step(const VectorXd& v, const VectorXd& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) {
      alpha = std::min(alpha, -v[i] / dv[i]);
    }
  }
  return alpha;
}

struct NormalSolver {
  Eigen::SimplicialLDLT<SpMat> ldlt;
  SpMat M;

  bool factor(const SpMat& G, const VectorXd& theta_x, const VectorXd& theta_s,
              double reg) {
    SpMat GT = G.transpose();
    M = G * theta_x.asDiagonal() * GT;
    VectorXd diag_add = theta_s;
    for (int i = 0; i < M.rows(); ++i) {
      M.coeffRef(i, i) += diag_add[i] + reg;
    }
    ldlt.compute(M);
    return ldlt.info() == Eigen::Success;
  }

  VectorXd solve(const VectorXd& rhs) const {
    VectorXd y = ldlt.solve(rhs);
    VectorXd resid = rhs - M * y;  // one round of refinement
    y += ldlt.solve(resid);
    return y;
  }
};

}  // namespace

Solution InteriorPointSolver::solve(const Problem& problem) const {
  const int nv_all = problem.num_vars();
  const int ng = problem.num_rows();
  if (problem.G.rows() != ng || problem.G.cols() != nv_all ||
      problem.upper.size() != nv_all) {
    throw std::invalid_argument("inconsistent LP dimensions");
  }
  if (ng == 0) {
    throw std::invalid_argument("LP must have at least one constraint row");
  }

  Solution out;
  for (Eigen::Index j = 0; j < nv_all; ++j) {
    if (problem.upper[j] < 0.0) {
      out.status = Status::infeasible;
      out.message = "variable with negative upper bound";
      return out;
    }
  }

  // Presolve: variables fixed at zero by a zero upper bound drop out.
  std::vector<int> keep;
  keep.reserve(nv_all);
  for (int j = 0; j < nv_all; ++j) {
    if (problem.upper[j] > 0.0) keep.push_back(j);
  }
  const int nv = static_cast<int>(keep.size());
  if (nv == 0) {
    // Everything fixed: feasible iff h >= 0.
    out.x = VectorXd::Zero(nv_all);
    if ((problem.h.array() >= -1e-12).all()) {
      out.status = Status::optimal;
      out.objective = 0.0;
    } else {
      out.status = Status::infeasible;
      out.message = "all variables fixed, constraints violated";
    }
    return out;
  }

  SpMat G(ng, nv);
  {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(problem.G.nonZeros());
    std::vector<int> col_of(nv_all, -1);
    for (int jj = 0; jj < nv; ++jj) col_of[keep[jj]] = jj;
    for (int k = 0; k < problem.G.outerSize(); ++k) {
      for (SpMat::InnerIterator it(problem.G, k); it; ++it) {
        const int cj = col_of[it.col()];
        if (cj >= 0 && it.value() != 0.0) {
          trip.emplace_back(it.row(), cj, it.value());
        }
      }
    }
    G.setFromTriplets(trip.begin(), trip.end());
    G.makeCompressed();
  }
  VectorXd c(nv), u(nv);
  for (int jj = 0; jj < nv; ++jj) {
    c[jj] = problem.c[keep[jj]];
    u[jj] = problem.upper[keep[jj]];
  }
  VectorXd h = problem.h;

  // Ruiz equilibration: three sqrt inf-norm passes over rows and columns.
  VectorXd row_scale = VectorXd::Ones(ng), col_scale = VectorXd::Ones(nv);
  for (int pass = 0; pass < 3; ++pass) {
    VectorXd rmax = VectorXd::Zero(ng), cmax = VectorXd::Zero(nv);
    for (int k = 0; k < G.outerSize(); ++k) {
      for (SpMat::InnerIterator it(G, k); it; ++it) {
        const double a = std::abs(it.value());
        rmax[it.row()] = std::max(rmax[it.row()], a);
        cmax[it.col()] = std::max(cmax[it.col()], a);
      }
    }
    VectorXd rs = rmax.unaryExpr(
        [](double v) { return v > 0 ? 1.0 / std::sqrt(v) : 1.0; });
    VectorXd cs = cmax.unaryExpr(
        [](double v) { return v > 0 ? 1.0 / std::sqrt(v) : 1.0; });
    G = rs.asDiagonal() * G * cs.asDiagonal();
    row_scale.array() *= rs.array();
    col_scale.array() *= cs.array();
  }
  // x = col_scale .* x'; rows scaled by row_scale.
  h.array() *= row_scale.array();
  c.array() *= col_scale.array();
  u.array() /= col_scale.array();

  std::vector<int> bounded;
  for (int j = 0; j < nv; ++j) {
    if (std::isfinite(u[j])) bounded.push_back(j);
  }
  const int nb = static_cast<int>(bounded.size());

  const double tol = options_.tolerance;
  NormalSolver normal;

  // Starting point from the least-squares heuristic (theta = I).
  VectorXd x, s, y, lx, ls, w(nb), mu(nb);
  {
    if (!normal.factor(G, VectorXd::Ones(nv), VectorXd::Ones(ng), 1e-12)) {
      out.status = Status::numerical_failure;
      out.message = "initial factorization failed";
      return out;
    }
    VectorXd v = normal.solve(h);
    x = G.transpose() * v;
    s = v;
    y = normal.solve(G * c);
    lx = c - G.transpose() * y;
    ls = -y;
    const double dp =
        std::max(0.0, -1.5 * std::min(x.size() ? x.minCoeff() : 0.0,
                                      s.size() ? s.minCoeff() : 0.0));
    const double dd =
        std::max(0.0, -1.5 * std::min(lx.size() ? lx.minCoeff() : 0.0,
                                      ls.size() ? ls.minCoeff() : 0.0));
    x.array() += dp;
    s.array() += dp;
    lx.array() += dd;
    ls.array() += dd;
    const double prod = x.dot(lx) + s.dot(ls);
    const double sum_l = lx.sum() + ls.sum();
    const double sum_x = x.sum() + s.sum();
    const double dp2 = sum_l > 1e-12 ? 0.5 * prod / sum_l : 1.0;
    const double dd2 = sum_x > 1e-12 ? 0.5 * prod / sum_x : 1.0;
    x.array() += dp2;
    s.array() += dp2;
    lx.array() += dd2;
    ls.array() += dd2;
    // A zero objective (or zero right-hand side) collapses the least-squares
    // start onto the boundary; recentre so every iterate starts interior.
    if (x.dot(lx) + s.dot(ls) <= 1e-12 * double(nv + ng)) {
      x.array() += 1.0;
      s.array() += 1.0;
      lx.array() += 1.0;
      ls.array() += 1.0;
    }
    const double mu0 = (x.dot(lx) + s.dot(ls)) / double(nv + ng);
    for (int bi = 0; bi < nb; ++bi) {
      const int j = bounded[bi];
      w[bi] = std::max(u[j] - x[j], 0.1 * std::max(1.0, u[j]));
      mu[bi] = std::max(mu0 / w[bi], 1e-8);
    }
  }

  const double h_norm = 1.0 + inf_norm(h);
  const double c_norm = 1.0 + inf_norm(c);
  double u_norm = 1.0;
  for (int bi = 0; bi < nb; ++bi) u_norm = std::max(u_norm, u[bounded[bi]]);

  // Best iterate seen so far, by worst relative residual. Near-degenerate
  // programs hit a cancellation floor slightly above the tolerance; the best
  // iterate is then the answer, and pushing the barrier further only
  // destroys the scaling matrices.
  VectorXd best_x;
  double best_score = kInf;

  for (int iter = 1; iter <= options_.max_iterations; ++iter) {
    // Residuals.
    VectorXd r_p = h - G * x - s;
    VectorXd r_u(nb), mu_ext = VectorXd::Zero(nv);
    for (int bi = 0; bi < nb; ++bi) {
      const int j = bounded[bi];
      r_u[bi] = u[j] - x[j] - w[bi];
      mu_ext[j] = mu[bi];
    }
    VectorXd r_dx = c - G.transpose() * y - lx + mu_ext;
    VectorXd r_ds = -y - ls;

    const double pobj = c.dot(x);
    double dobj = h.dot(y);
    for (int bi = 0; bi < nb; ++bi) dobj -= u[bounded[bi]] * mu[bi];

    const double rel_p =
        std::max(inf_norm(r_p) / h_norm, inf_norm(r_u) / (1.0 + u_norm));
    const double rel_d = std::max(inf_norm(r_dx), inf_norm(r_ds)) / c_norm;
    const double rel_g = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));

    if (rel_p <= tol && rel_d <= tol && rel_g <= tol) {
      out.status = Status::optimal;
      out.iterations = iter - 1;
      break;
    }
    if (!std::isfinite(rel_p) || !std::isfinite(rel_d) ||
        !std::isfinite(rel_g)) {
      out.status = Status::numerical_failure;
      out.message = "non-finite residuals";
      out.iterations = iter - 1;
      break;
    }

    const double score = std::max({rel_p, rel_d, rel_g});
    if (score < best_score) {
      best_score = score;
      best_x = x;
    }

    const double mu_bar =
        (x.dot(lx) + s.dot(ls) + (nb ? w.dot(mu) : 0.0)) / double(nv + ng + nb);
    // Complementarity resolved two orders beyond tol: no further centering is
    // possible, so decide now instead of overdriving the barrier.
    if (mu_bar <= tol * 1e-2) {
      if (best_score <= tol * 1e3) {
        x = best_x;
        out.status = Status::optimal;
        out.message = "accepted best iterate at reduced accuracy";
        out.iterations = iter - 1;
        break;
      }
      if (rel_p > 1e-3) {
        out.status = Status::infeasible;
        out.message = "complementarity converged with primal residual stuck";
        out.iterations = iter - 1;
        break;
      }
      out.status = Status::numerical_failure;
      out.message = "stalled short of tolerance";
      out.iterations = iter - 1;
      break;
    }
    // A diverging iterate after near-convergence: restore the best point.
    if (score > 1e4 * best_score && best_score <= tol * 1e3) {
      x = best_x;
      out.status = Status::optimal;
      out.message = "accepted best iterate at reduced accuracy";
      out.iterations = iter - 1;
      break;
    }
    if (dobj > 1e13 * (1.0 + std::abs(pobj))) {
      out.status = Status::infeasible;
      out.message = "dual objective diverging";
      out.iterations = iter - 1;
      break;
    }
    if (pobj < -1e13 * (1.0 + std::abs(dobj))) {
      out.status = Status::numerical_failure;
      out.message = "objective unbounded below";
      out.iterations = iter - 1;
      break;
    }

    // Scaling matrices.
    VectorXd dx_scale = (lx.array() / x.array()).matrix();
    for (int bi = 0; bi < nb; ++bi) {
      dx_scale[bounded[bi]] += mu[bi] / w[bi];
    }
    VectorXd theta_x = dx_scale.cwiseInverse();
    VectorXd theta_s = (s.array() / ls.array()).matrix();

    double reg = 1e-12;
    bool factored = false;
    for (int attempt = 0; attempt < 4 && !factored; ++attempt) {
      factored = normal.factor(G, theta_x, theta_s, reg);
      reg *= 1e3;
    }
    if (!factored) {
      out.status = Status::numerical_failure;
      out.message = "normal equations factorization failed";
      out.iterations = iter - 1;
      break;
    }

    auto direction = [&](const VectorXd& gx, const VectorXd& gs,
                         const VectorXd& gw, VectorXd& dxv, VectorXd& dsv,
                         VectorXd& dyv, VectorXd& dlx, VectorXd& dls,
                         VectorXd& dwv, VectorXd& dmu) {
      VectorXd rhat_x = r_dx + lx - (gx.array() / x.array()).matrix();
      for (int bi = 0; bi < nb; ++bi) {
        const int j = bounded[bi];
        rhat_x[j] += gw[bi] / w[bi] - mu[bi] - (mu[bi] / w[bi]) * r_u[bi];
      }
      VectorXd rhat_s = r_ds + ls - (gs.array() / s.array()).matrix();
      VectorXd rhs = r_p + G * (theta_x.array() * rhat_x.array()).matrix() +
                     (theta_s.array() * rhat_s.array()).matrix();
      dyv = normal.solve(rhs);
      dxv = (theta_x.array() * ((G.transpose() * dyv) - rhat_x).array()).matrix();
      dsv = (theta_s.array() * (dyv - rhat_s).array()).matrix();
      dlx = (gx.array() / x.array()).matrix() - lx -
            ((lx.array() / x.array()) * dxv.array()).matrix();
      dls = (gs.array() / s.array()).matrix() - ls -
            ((ls.array() / s.array()) * dsv.array()).matrix();
      dwv.resize(nb);
      dmu.resize(nb);
      for (int bi = 0; bi < nb; ++bi) {
        const int j = bounded[bi];
        dwv[bi] = r_u[bi] - dxv[j];
        dmu[bi] = gw[bi] / w[bi] - mu[bi] - (mu[bi] / w[bi]) * dwv[bi];
      }
    };

    // Affine direction.
    VectorXd ax, as, ay, alx, als, aw, amu;
    direction(VectorXd::Zero(nv), VectorXd::Zero(ng), VectorXd::Zero(nb), ax,
              as, ay, alx, als, aw, amu);
    double ap = std::min({max_step(x, ax), max_step(s, as),
                          nb ? max_step(w, aw) : 1.0});
    double ad = std::min({max_step(lx, alx), max_step(ls, als),
                          nb ? max_step(mu, amu) : 1.0});
    double mu_aff = ((x + ap * ax).dot(lx + ad * alx) +
                     (s + ap * as).dot(ls + ad * als)) /
                    double(nv + ng + nb);
    if (nb) mu_aff += (w + ap * aw).dot(mu + ad * amu) / double(nv + ng + nb);
    const double sigma = std::pow(std::clamp(mu_aff / mu_bar, 0.0, 1.0), 3);

    // Combined predictor-corrector direction.
    VectorXd gx = (VectorXd::Constant(nv, sigma * mu_bar).array() -
                   ax.array() * alx.array())
                      .matrix();
    VectorXd gs = (VectorXd::Constant(ng, sigma * mu_bar).array() -
                   as.array() * als.array())
                      .matrix();
    VectorXd gw(nb);
    for (int bi = 0; bi < nb; ++bi) {
      gw[bi] = sigma * mu_bar - aw[bi] * amu[bi];
    }
    VectorXd dxv, dsv, dyv, dlx, dls, dwv, dmu;
    direction(gx, gs, gw, dxv, dsv, dyv, dlx, dls, dwv, dmu);

    ap = std::min({max_step(x, dxv), max_step(s, dsv),
                   nb ? max_step(w, dwv) : 1.0});
    ad = std::min({max_step(lx, dlx), max_step(ls, dls),
                   nb ? max_step(mu, dmu) : 1.0});
    ap = std::min(1.0, 0.9995 * ap);
    ad = std::min(1.0, 0.9995 * ad);
    if (ap < 1e-12 && ad < 1e-12) {
      out.status = Status::numerical_failure;
      out.message = "step length collapsed";
      out.iterations = iter;
      break;
    }

    x += ap * dxv;
    s += ap * dsv;
    y += ad * dyv;
    lx += ad * dlx;
    ls += ad * dls;
    if (nb) {
      w += ap * dwv;
      mu += ad * dmu;
    }
    out.iterations = iter;
    if (iter == options_.max_iterations) {
      if (best_score <= tol * 1e3) {
        x = best_x;
        out.status = Status::optimal;
        out.message = "accepted best iterate at reduced accuracy";
      } else {
        out.status = Status::iteration_limit;
        out.message = "iteration limit reached";
      }
    }
  }
  if (out.status == Status::optimal || out.status == Status::iteration_limit) {
    VectorXd x_full = VectorXd::Zero(nv_all);
    for (int jj = 0; jj < nv; ++jj) {
      double xj = x[jj] * col_scale[jj];
      xj = std::max(xj, 0.0);
      if (std::isfinite(problem.upper[keep[jj]])) {
        xj = std::min(xj, problem.upper[keep[jj]]);
      }
      x_full[keep[jj]] = xj;
    }
    out.x = x_full;
    out.objective = problem.c.dot(x_full);
  }
  return out;
}

const Solver& bundled_solver() {
  static const InteriorPointSolver solver;
  return solver;
}

}  // namespace firemap::lp
