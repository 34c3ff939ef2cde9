// Linear stability of the exponential multistep schemes on the split test
// equation y' = lambda*y, a = theta*lambda, b = (1-theta)*lambda*y, plus the
// positivity step-size bounds for orders 2 and 3.
#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

namespace exab {

struct Grid1D {
  double z_min = -30.0;
  double z_max = 0.0;
  double dx = 0.01;
};

struct Grid2D {
  double re_min = -40.0;
  double re_max = 2.0;
  double im_min = 0.0;
  double im_max = 60.0;
  double dx = 0.05;
};

// Coefficients c_1..c_k of the characteristic polynomial
// xi^k + c_1 xi^{k-1} + ... + c_k of the order-k scheme at z = lambda*h:
// one step maps (y_{n-k+1}..y_n) linearly, with
//   xi^k = e^{theta z} xi^{k-1} + (1-theta) z sum_i C_i xi^{k-1-i},
//   C_i = sum_j phi_j(theta z) * gamma_table(k)(j-1, i).
// Derived mechanically from the step formula, not transcribed.
Eigen::VectorXcd stability_poly_coeffs(int k, double theta,
                                       std::complex<double> z);

// Largest root modulus of xi^k + c[0] xi^{k-1} + ... + c[k-1]: closed form
// for degree <= 2, companion-matrix eigenvalues above.
double max_root_modulus(const Eigen::VectorXcd& c);

// Stability radius rho(z) = max root modulus of the characteristic
// polynomial. rho < 1 means z lies in the stability domain.
double rho(int k, double theta, std::complex<double> z);

// Limit of rho along the negative real axis, z -> -inf. Finite closed form:
// e^{theta z} -> 0 and z*phi_j(theta z) -> -1/((j-1)! theta), so the limit
// polynomial has constant coefficients.
double rho_limit(int k, double theta);

// A(0) scan: true iff rho < 1 at every grid node z < 0 AND the z -> -inf
// limit polynomial is stable. The finite grid alone cannot detect a scheme
// that loses stability only arbitrarily far down the real axis (this happens
// near the upper theta threshold, where rho approaches its limit from below),
// so the asymptotic check is part of the definition here.
bool scan_a0(int k, double theta, const Grid1D& grid = {});

// theta values tol apart with scan_a0 false at `unstable` and true at `stable`.
struct ThetaBracket {
  double unstable;
  double stable;
};

struct ThetaThresholds {
  ThetaBracket lower;                 // stability begins: unstable < stable
  std::optional<ThetaBracket> upper;  // stability ends: stable < unstable
};

// Walks scan_a0 over [theta_lo, theta_hi] and bisects each transition to
// width tol. Throws std::runtime_error if the interval shows no transition
// from unstable to stable.
ThetaThresholds find_theta_thresholds(int k, double theta_lo, double theta_hi,
                                      double tol, const Grid1D& grid = {});

// rho sampled on a rectangle of z values. Node (iy, ix) corresponds to
// z = (re_min + ix*dx) + i*(im_min + iy*dx); only the upper half-plane is
// needed because rho(conj z) = rho(z). Rows are computed concurrently.
struct StabilityGrid {
  Grid2D spec;
  int nx = 0;
  int ny = 0;
  Eigen::MatrixXd rho;  // ny x nx
};

StabilityGrid stability_grid(int k, double theta, const Grid2D& grid = {},
                             int threads = 0);

// Startup admissibility factor C_p and bound checks for the order-2 and
// order-3 positivity conditions on the scalar problem y' = a*y + b(t),
// a <= 0, with b confined so the exact flow stays in [K1, K2]:
//   order 2: h <= 1/|a|      and C_p K1 <= e^{ah} y1 - h phi2(ah) b0 <= C_p K2,
//            C_p = e^{ah} + a h phi2(ah)
//   order 3: h <= beta3/|a|  and C_p K1 <= e^{ah} y2 - 2h (phi2+phi3) b1 <= C_p K2,
//            C_p = e^{ah} + 2 a h (phi2(ah)+phi3(ah))
// Both throw std::invalid_argument for a > 0, nonpositive h, or K1 > K2.
double eab2_positivity_cp(double h, double a);
double eab3_positivity_cp(double h, double a);
bool positivity_check_eab2(double h, double a, double y1, double b0, double K1,
                           double K2);
bool positivity_check_eab3(double h, double a, double y2, double b1, double K1,
                           double K2);

// Largest x > 0 with psi(-s) >= 0 for all s in [0, x], where
// psi(z) = phi1(z) e^z + phi2(z) (3/2 e^z - 2) + phi3(z) (e^z - 2).
// psi(0) = 7/12 and psi(-s) crosses zero once near 0.331; bisected to tol.
// This is the step-size constant used by the order-3 positivity bound.
double compute_beta3(double tol = 1e-12);

// The order-3 step bound h <= beta3/|a| uses this cached value.
double beta3();

}  // namespace exab
