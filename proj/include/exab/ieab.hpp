// Integral variant of the exponential multistep schemes: both the stabilizer a
// and the remainder b are interpolated from history, the stabilizer integral
// is carried exactly and the remaining integral is approximated by quadrature.
// Orders 2 and 3 use Simpson's rule on [t_n, t_n + h]; order 4 uses 3-point
// Gauss-Legendre. The closed-form node coefficients below are what the
// interpolation and the primitive of the interpolant evaluate to; tests verify
// them against that construction directly.
#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "exab/types.hpp"

namespace exab {

// Exponents g = integral of the interpolated stabilizer, and interpolated b,
// at the quadrature nodes. Simpson (k = 2, 3) fills g_end, delta = g_end
// minus the half-point exponent, b_end and b_half; Gauss (k = 4) fills g_end,
// the three interior exponents and the three interpolated b values.
struct IeabNodeValues {
  Eigen::ArrayXd g_end;
  Eigen::ArrayXd delta, b_end, b_half;
  Eigen::ArrayXd g_left, g_mid, g_right, b_left, b_mid, b_right;
};

IeabNodeValues ieab_node_values(int k, double h, const HistoryWindow& hist);

StateVector ieab_step(int k, double h, const HistoryWindow& hist);

}  // namespace exab
