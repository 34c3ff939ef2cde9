#include "exab/classical.hpp"

#include <cmath>

namespace exab {

Eigen::VectorXd ab_weights(int k) {
  Eigen::VectorXd w(k);
  switch (k) {
    case 1:
      w << 1.0;
      break;
    case 2:
      w << 1.5, -0.5;
      break;
    case 3:
      w << 23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0;
      break;
    case 4:
      w << 55.0 / 24.0, -59.0 / 24.0, 37.0 / 24.0, -9.0 / 24.0;
      break;
    default:
      throw std::invalid_argument("ab_weights: order must be 1..4");
  }
  return w;
}

StateVector ab_step(int k, double h, const HistoryWindow& hist) {
  if (hist.size() < k) throw std::invalid_argument("ab_step: history too short");
  const Eigen::VectorXd w = ab_weights(k);
  const auto& newest = hist.newest();
  StateVector acc = StateVector::Zero(newest.y.size());
  for (int i = 0; i < k; ++i) {
    const auto& s = hist.newest(i);
    acc += w[i] * (s.a.cwiseProduct(s.y) + s.b);
  }
  return newest.y + h * acc;
}

namespace {

struct BdfTableau {
  Eigen::VectorXd alpha;
  double beta;
};

BdfTableau bdf_tableau(int k) {
  BdfTableau t;
  switch (k) {
    case 2:
      t.alpha = Eigen::VectorXd(2);
      t.alpha << 4.0 / 3.0, -1.0 / 3.0;
      t.beta = 2.0 / 3.0;
      break;
    case 3:
      t.alpha = Eigen::VectorXd(3);
      t.alpha << 18.0 / 11.0, -9.0 / 11.0, 2.0 / 11.0;
      t.beta = 6.0 / 11.0;
      break;
    case 4:
      t.alpha = Eigen::VectorXd(4);
      t.alpha << 48.0 / 25.0, -36.0 / 25.0, 16.0 / 25.0, -3.0 / 25.0;
      t.beta = 12.0 / 25.0;
      break;
    default:
      throw std::invalid_argument("bdf_step: order must be 2..4");
  }
  return t;
}

}  // namespace

ImplicitStepResult bdf_step(int k, double h, const SplitSystem& sys,
                            const HistoryWindow& hist, const NewtonConfig& cfg) {
  if (hist.size() < k) throw std::invalid_argument("bdf_step: history too short");
  const BdfTableau tab = bdf_tableau(k);
  const int n = sys.dim;
  const double t_new = hist.newest().t + h;

  StateVector fixed = StateVector::Zero(n);
  for (int i = 0; i < k; ++i) fixed += tab.alpha[i] * hist.newest(i).y;

  // residual F(u) = u - beta h f(t_new, u) - fixed
  const auto residual = [&](const StateVector& u) -> StateVector {
    return u - tab.beta * h * sys.eval_f(t_new, u) - fixed;
  };

  StateVector u = 2.0 * hist.newest(0).y - hist.newest(1).y;
  ImplicitStepResult out;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const StateVector f0 = sys.eval_f(t_new, u);
    const StateVector F = u - tab.beta * h * f0 - fixed;
    if (!F.allFinite()) return out;
    const double normF = F.cwiseAbs().maxCoeff();

    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
    for (int c = 0; c < n; ++c) {
      const double eps = cfg.fd_eps * std::max(1.0, std::abs(u[c]));
      StateVector up = u;
      up[c] += eps;
      J.col(c) -= (tab.beta * h / eps) * (sys.eval_f(t_new, up) - f0);
    }
    const StateVector du = J.partialPivLu().solve(-F);
    if (!du.allFinite()) return out;

    double lambda = 1.0;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
      const StateVector Fn = residual(u + lambda * du);
      if (Fn.allFinite() && Fn.cwiseAbs().maxCoeff() < normF) break;
      lambda *= 0.5;
    }
    u += lambda * du;
    out.iterations = it + 1;
    if (lambda * du.cwiseAbs().maxCoeff() <=
        cfg.abs_tol + cfg.rel_tol * u.cwiseAbs().maxCoeff()) {
      if (!u.allFinite()) return out;
      out.converged = true;
      out.y = std::move(u);
      return out;
    }
  }
  return out;
}

StateVector rk4_step(const SplitSystem& sys, double t, const StateVector& y, double h) {
  const StateVector k1 = sys.eval_f(t, y);
  const StateVector k2 = sys.eval_f(t + 0.5 * h, y + 0.5 * h * k1);
  const StateVector k3 = sys.eval_f(t + 0.5 * h, y + 0.5 * h * k2);
  const StateVector k4 = sys.eval_f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace exab
