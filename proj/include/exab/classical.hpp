// Classical reference schemes: explicit Adams-Bashforth, implicit BDF with a
// damped Newton solver (dense finite-difference Jacobian), and classical RK4.
#pragma once

#include <Eigen/Dense>

#include "exab/types.hpp"

namespace exab {

struct NewtonConfig {
  int max_iters = 25;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  // forward-difference increment scale, multiplied by max(1, |u_i|) per column
  double fd_eps = 1.4901161193847656e-08;
  int max_backtracks = 8;
};

struct ImplicitStepResult {
  StateVector y;
  int iterations = 0;
  bool converged = false;
};

// Adams-Bashforth weights for the k most recent f values, newest first.
Eigen::VectorXd ab_weights(int k);

// One AB_k step; f at history nodes is reassembled as a.*y + b from the
// cached samples.
StateVector ab_step(int k, double h, const HistoryWindow& hist);

// One BDF_k step: solves y_new = sum_i alpha_i y_{n-i} + beta h f(t_new, y_new)
// by damped Newton from the linearly extrapolated previous states.
ImplicitStepResult bdf_step(int k, double h, const SplitSystem& sys,
                            const HistoryWindow& hist, const NewtonConfig& cfg = {});

StateVector rk4_step(const SplitSystem& sys, double t, const StateVector& y, double h);

}  // namespace exab
