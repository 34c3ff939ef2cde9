// Independent reference constructions the library results are tested against.
// Everything here is built from first principles (interpolation, primitives,
// quadrature) rather than from the closed-form tables the implementation uses.
// Interpolation runs in the scaled variable s = (t - t_n)/h on the integer
// nodes 0, -1, ..., where the Lagrange basis expansion is exact in floating
// point, so the oracle values carry no conditioning error of their own.
#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Monomial coefficients of the Lagrange basis polynomials for the nodes.
inline std::vector<Eigen::VectorXd> lagrange_basis(const std::vector<double>& nodes) {
  const int n = static_cast<int>(nodes.size());
  std::vector<Eigen::VectorXd> basis;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c(0) = 1.0;
    int deg = 0;
    double den = 1.0;
    for (int m = 0; m < n; ++m) {
      if (m == i) continue;
      const double x = nodes[static_cast<size_t>(m)];
      // multiply the accumulated polynomial by (s - x), highest term first
      for (int q = deg + 1; q >= 0; --q)
        c(q) = (q > 0 ? c(q - 1) : 0.0) - c(q) * x;
      ++deg;
      den *= nodes[static_cast<size_t>(i)] - x;
    }
    basis.push_back(c / den);
  }
  return basis;
}

// Monomial coefficients of the interpolant through (nodes[i], values[i]).
inline Eigen::VectorXd interp_coeffs(const std::vector<double>& nodes,
                                     const std::vector<double>& values) {
  const auto basis = lagrange_basis(nodes);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes.size()));
  for (size_t i = 0; i < nodes.size(); ++i) c += values[i] * basis[i];
  return c;
}

inline double poly_eval(const Eigen::VectorXd& coeffs, double x) {
  double acc = 0.0;
  for (int m = static_cast<int>(coeffs.size()) - 1; m >= 0; --m)
    acc = acc * x + coeffs(m);
  return acc;
}

// Integral of the polynomial from 0 to x.
inline double poly_integral(const Eigen::VectorXd& coeffs, double x) {
  double acc = 0.0;
  for (int m = static_cast<int>(coeffs.size()) - 1; m >= 0; --m)
    acc = (acc + coeffs(m) / (m + 1)) * x;
  return acc;
}

// Integer history nodes s = 0, -1, ..., -(k-1), newest first.
inline std::vector<double> history_nodes(int k) {
  std::vector<double> nodes(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) nodes[static_cast<size_t>(i)] = -i;
  return nodes;
}

// gamma_j for scalar data from the definition: fit the interpolant p(s)
// through (s, g) = (0, g[0]), (-1, g[1]), ..., then gamma_j = (j-1)! times
// the s^{j-1} coefficient. g is newest first.
inline std::vector<double> gamma_from_interpolant(int k,
                                                  const std::vector<double>& g) {
  const Eigen::VectorXd coeffs = interp_coeffs(history_nodes(k), g);
  std::vector<double> gamma(static_cast<size_t>(k));
  double fact = 1.0;
  for (int j = 1; j <= k; ++j) {
    gamma[static_cast<size_t>(j - 1)] = fact * coeffs(j - 1);
    fact *= j;
  }
  return gamma;
}

// One scalar integral-variant step built directly from its definition:
// interpolate the stabilizer and remainder histories (newest first, nodes
// t_n - i*h), integrate the stabilizer interpolant exactly and apply the
// quadrature rule (Simpson for k = 2, 3; 3-point Gauss for k = 4) to
// int_0^h exp(A(h) - A(tau)) b~(tau) dtau with A the primitive from t_n.
inline double ieab_reference_step(int k, double h, const std::vector<double>& a,
                                  const std::vector<double>& b, double y_n) {
  const auto nodes = history_nodes(k);
  const Eigen::VectorXd ac = interp_coeffs(nodes, a);
  const Eigen::VectorXd bc = interp_coeffs(nodes, b);
  // a~(t_n + tau) = poly(tau/h), so the primitive picks up a factor h
  const auto A = [&](double tau) { return h * poly_integral(ac, tau / h); };
  const auto bt = [&](double tau) { return poly_eval(bc, tau / h); };
  const double Ah = A(h);
  if (k <= 3) {
    const double integral = (h / 6.0) * (std::exp(Ah) * bt(0.0) +
                                         4.0 * std::exp(Ah - A(0.5 * h)) * bt(0.5 * h) +
                                         bt(h));
    return std::exp(Ah) * y_n + integral;
  }
  const double off = 0.5 * h * std::sqrt(3.0 / 5.0);
  const double tl = 0.5 * h - off, tm = 0.5 * h, tr = 0.5 * h + off;
  const double integral =
      (h / 18.0) * (5.0 * std::exp(Ah - A(tl)) * bt(tl) +
                    8.0 * std::exp(Ah - A(tm)) * bt(tm) +
                    5.0 * std::exp(Ah - A(tr)) * bt(tr));
  return std::exp(Ah) * y_n + integral;
}

// RK4 applied to y' = lambda*y advances by this polynomial in z = lambda*h.
inline std::complex<double> rk4_growth(std::complex<double> z) {
  return 1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)));
}

inline std::mt19937_64 rng(unsigned long long seed) {
  return std::mt19937_64(seed);
}

}  // namespace oracle
