#pragma once

// Dense convex QP solver: primal-dual interior point with Mehrotra
// predictor-corrector steps.  Solves
//
//   min 1/2 x'Px + q'x   s.t.  A x = b  (duals y),  G x <= h  (duals z >= 0)
//
// and reports central duals at tight tolerance; dual quality drives the
// pricing modules downstream.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace iuc {

enum class QpStatus { Optimal, MaxIterations, Infeasible };

inline const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::MaxIterations: return "max_iterations";
    case QpStatus::Infeasible: return "infeasible";
  }
  return "?";
}

struct QpProblem {
  Eigen::MatrixXd P;  // n x n, PSD
  Eigen::VectorXd q;  // n
  Eigen::MatrixXd A;  // me x n
  Eigen::VectorXd b;  // me
  Eigen::MatrixXd G;  // mi x n
  Eigen::VectorXd h;  // mi
  double obj_const = 0.0;
};

struct QpSolution {
  QpStatus status = QpStatus::Infeasible;
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // equality duals
  Eigen::VectorXd z;  // inequality duals (>= 0)
  Eigen::VectorXd s;  // inequality slacks (>= 0)
  double objective = 0.0;
  int iterations = 0;
  double gap = 0.0;        // final complementarity measure
  double primal_res = 0.0;
  double dual_res = 0.0;
};

struct QpOptions {
  double tol = 1e-9;
  int max_iter = 200;
  double reg = 1e-9;  // static regularization of the KKT system
};

inline QpSolution solve_qp(const QpProblem& p, const QpOptions& opt = {}) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const int n = static_cast<int>(p.q.size());
  const int me = static_cast<int>(p.b.size());
  const int mi = static_cast<int>(p.h.size());

  QpSolution sol;
  if (mi == 0) {
    // Pure equality-constrained QP: one regularized KKT solve.
    MatrixXd K = MatrixXd::Zero(n + me, n + me);
    K.topLeftCorner(n, n) = p.P + opt.reg * MatrixXd::Identity(n, n);
    if (me > 0) {
      K.topRightCorner(n, me) = p.A.transpose();
      K.bottomLeftCorner(me, n) = p.A;
      K.bottomRightCorner(me, me) = -opt.reg * MatrixXd::Identity(me, me);
    }
    VectorXd rhs(n + me);
    rhs.head(n) = -p.q;
    rhs.tail(me) = p.b;
    VectorXd xy = K.partialPivLu().solve(rhs);
    sol.x = xy.head(n);
    sol.y = xy.tail(me);
    sol.z.resize(0);
    sol.s.resize(0);
    sol.status = QpStatus::Optimal;
    sol.objective = 0.5 * sol.x.dot(p.P * sol.x) + p.q.dot(sol.x) + p.obj_const;
    sol.primal_res = me > 0 ? (p.A * sol.x - p.b).lpNorm<Eigen::Infinity>() : 0;
    return sol;
  }

  VectorXd x = VectorXd::Zero(n);
  VectorXd y = VectorXd::Zero(me);
  VectorXd z = VectorXd::Ones(mi);
  VectorXd s = VectorXd::Ones(mi);

  // Initial x: regularized equality-constrained minimizer.
  {
    MatrixXd K = MatrixXd::Zero(n + me, n + me);
    K.topLeftCorner(n, n) = p.P + MatrixXd::Identity(n, n);
    if (me > 0) {
      K.topRightCorner(n, me) = p.A.transpose();
      K.bottomLeftCorner(me, n) = p.A;
      K.bottomRightCorner(me, me) = -1e-8 * MatrixXd::Identity(me, me);
    }
    VectorXd rhs(n + me);
    rhs.head(n) = -p.q;
    rhs.tail(me) = p.b;
    VectorXd xy = K.partialPivLu().solve(rhs);
    x = xy.head(n);
    if (me > 0) y = xy.tail(me);
    VectorXd r = p.G * x - p.h;
    double shift = std::max(1.0, 1.5 * r.maxCoeff());
    s = (shift * VectorXd::Ones(mi) - r).cwiseMax(1.0);
  }

  const double scale =
      1.0 + std::max({p.q.lpNorm<Eigen::Infinity>(),
                      me > 0 ? p.b.lpNorm<Eigen::Infinity>() : 0.0,
                      p.h.lpNorm<Eigen::Infinity>()});

  auto step_to_boundary = [](const VectorXd& v, const VectorXd& dv) {
    double a = 1.0;
    for (int i = 0; i < v.size(); ++i)
      if (dv(i) < 0) a = std::min(a, -v(i) / dv(i));
    return a;
  };

  MatrixXd K(n + me, n + me);
  Eigen::PartialPivLU<MatrixXd> lu;
  sol.status = QpStatus::MaxIterations;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    VectorXd rd = p.P * x + p.q + p.G.transpose() * z;
    if (me > 0) rd += p.A.transpose() * y;
    VectorXd rp = me > 0 ? VectorXd(p.A * x - p.b) : VectorXd(0);
    VectorXd rg = p.G * x + s - p.h;
    double mu = s.dot(z) / mi;

    sol.primal_res = std::max(me > 0 ? rp.lpNorm<Eigen::Infinity>() : 0.0,
                              rg.lpNorm<Eigen::Infinity>());
    sol.dual_res = rd.lpNorm<Eigen::Infinity>();
    sol.gap = mu;
    sol.iterations = iter;
    if (sol.primal_res <= opt.tol * scale && sol.dual_res <= opt.tol * scale &&
        mu <= opt.tol * scale) {
      sol.status = QpStatus::Optimal;
      break;
    }
    if (z.lpNorm<Eigen::Infinity>() > 1e13 ||
        y.lpNorm<Eigen::Infinity>() > 1e13 || !std::isfinite(mu)) {
      sol.status = QpStatus::Infeasible;
      break;
    }
    // Early divergence exit: exploding duals while the primal residual is
    // still open indicate infeasibility long before the iteration cap.
    if (sol.primal_res > 1e-6 * scale &&
        (z.lpNorm<Eigen::Infinity>() > 1e8 ||
         y.lpNorm<Eigen::Infinity>() > 1e8)) {
      sol.status = QpStatus::Infeasible;
      break;
    }

    VectorXd w = z.cwiseQuotient(s);  // W = S^{-1} Z
    K.setZero();
    K.topLeftCorner(n, n) =
        p.P + p.G.transpose() * w.asDiagonal() * p.G +
        opt.reg * MatrixXd::Identity(n, n);
    if (me > 0) {
      K.topRightCorner(n, me) = p.A.transpose();
      K.bottomLeftCorner(me, n) = p.A;
      K.bottomRightCorner(me, me) = -opt.reg * MatrixXd::Identity(me, me);
    }
    lu.compute(K);

    auto solve_dir = [&](const VectorXd& rsz, VectorXd& dx, VectorXd& dy,
                         VectorXd& dz, VectorXd& ds) {
      // rsz is the target of Z ds + S dz = -rsz.
      VectorXd rhs(n + me);
      rhs.head(n) =
          -rd + p.G.transpose() * (rsz.cwiseQuotient(s) - w.cwiseProduct(rg));
      if (me > 0) rhs.tail(me) = -rp;
      VectorXd dxy = lu.solve(rhs);
      dx = dxy.head(n);
      dy = me > 0 ? VectorXd(dxy.tail(me)) : VectorXd(0);
      ds = -rg - p.G * dx;
      dz = -(rsz + z.cwiseProduct(ds)).cwiseQuotient(s);
    };

    // Affine (predictor) direction.
    VectorXd dx_a, dy_a, dz_a, ds_a;
    solve_dir(s.cwiseProduct(z), dx_a, dy_a, dz_a, ds_a);
    double ap = step_to_boundary(s, ds_a);
    double ad = step_to_boundary(z, dz_a);
    double a_aff = std::min(ap, ad);
    double mu_aff = (s + a_aff * ds_a).dot(z + a_aff * dz_a) / mi;
    double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
    sigma = std::min(1.0, std::max(0.0, sigma));

    // Corrector.
    VectorXd rsz = s.cwiseProduct(z) + ds_a.cwiseProduct(dz_a) -
                   sigma * mu * VectorXd::Ones(mi);
    VectorXd dx, dy, dz, ds;
    solve_dir(rsz, dx, dy, dz, ds);
    double alpha =
        0.99 * std::min(step_to_boundary(s, ds), step_to_boundary(z, dz));
    alpha = std::min(1.0, alpha);
    x += alpha * dx;
    if (me > 0) y += alpha * dy;
    z += alpha * dz;
    s += alpha * ds;
  }

  if (sol.status == QpStatus::MaxIterations && sol.primal_res > 1e-5 * scale) {
    // Ran out of iterations without closing the primal residual.
    sol.status = QpStatus::Infeasible;
  }
  sol.x = x;
  sol.y = y;
  sol.z = z;
  sol.s = s;
  sol.objective = 0.5 * x.dot(p.P * x) + p.q.dot(x) + p.obj_const;
  return sol;
}

}  // namespace iuc
