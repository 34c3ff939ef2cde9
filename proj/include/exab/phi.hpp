// Entire functions phi_j: phi_0 = exp, phi_{j+1}(z) = (phi_j(z) - 1/j!)/z,
// phi_j(0) = 1/j!. Works for real and complex scalars.
//
// Evaluation branches on |z|. Below the switch radius each phi_j is summed as
// the Taylor series sum_m z^m/(m+j)!, which is cancellation-free there. Above
// it the recursion is applied upward from phi_0 = exp(z). The recursion
// divides by z at each level, so applying it for small |z| amplifies the
// rounding of exp(z) by ~|z|^-j; a switch radius of 1 keeps phi_4 accurate to
// ~1e-14 relative on both sides of the boundary. (At radius 0.1 the recursion
// side would lose five more digits, which is measurable against a
// high-precision oracle.)
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "exab/types.hpp"

namespace exab {

inline constexpr double kPhiTaylorRadius = 1.0;
inline constexpr int kPhiMaxOrder = 4;

namespace detail {

inline constexpr std::array<double, 10> kInvFactorial = {
    1.0,         1.0,          1.0 / 2,      1.0 / 6,       1.0 / 24,
    1.0 / 120.0, 1.0 / 720.0,  1.0 / 5040.0, 1.0 / 40320.0, 1.0 / 362880.0};

template <typename Scalar>
Scalar phi_taylor(int j, Scalar z) {
  // term_0 = 1/j!, term_{m} = term_{m-1} * z/(m+j); 30 terms reach below
  // double rounding for |z| <= 1
  Scalar term = Scalar(kInvFactorial[static_cast<size_t>(j)]);
  Scalar sum = term;
  for (int m = 1; m <= 30; ++m) {
    term *= z / Scalar(m + j);
    sum += term;
  }
  return sum;
}

}  // namespace detail

// phi_0..phi_upto at a single point. upto in 0..4.
template <typename Scalar>
std::array<Scalar, kPhiMaxOrder + 1> phi_upto(Scalar z, int upto) {
  if (upto < 0 || upto > kPhiMaxOrder)
    throw std::invalid_argument("phi_upto: order must be 0..4");
  std::array<Scalar, kPhiMaxOrder + 1> out{};
  out[0] = std::exp(z);
  if (std::abs(z) < kPhiTaylorRadius) {
    for (int j = 1; j <= upto; ++j) out[static_cast<size_t>(j)] = detail::phi_taylor(j, z);
  } else {
    for (int j = 1; j <= upto; ++j) {
      out[static_cast<size_t>(j)] =
          (out[static_cast<size_t>(j - 1)] - Scalar(detail::kInvFactorial[static_cast<size_t>(j - 1)])) / z;
    }
  }
  return out;
}

// phi_j(a_i * h) for every diagonal entry a_i; column j holds phi_j values.
inline Eigen::MatrixXd phi_diag(const DiagStabilizer& a, double h, int upto) {
  if (upto < 0 || upto > kPhiMaxOrder)
    throw std::invalid_argument("phi_diag: order must be 0..4");
  Eigen::MatrixXd table(a.size(), upto + 1);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const auto row = phi_upto(a[i] * h, upto);
    for (int j = 0; j <= upto; ++j) table(i, j) = row[static_cast<size_t>(j)];
  }
  return table;
}

}  // namespace exab
