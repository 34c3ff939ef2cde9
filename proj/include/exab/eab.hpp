// Exponential multistep schemes with a frozen diagonal stabilizer.
//
// One step from history samples (t_{n-k+1}..t_n):
//   g_{n-i}   = b_{n-i} + (a_{n-i} - a_n).*y_{n-i}
//   gamma_j   = Table-of-weights combination of the g values
//   y_{n+1}   = exp(a_n h).*y_n + h sum_j phi_j(a_n h).*gamma_j      (direct)
// The production path instead uses the cost-optimal recursion
//   w_1 = a_n.*y_n + gamma_1,  w_j = gamma_j + a_n h .* w_{j-1}
//   y_{n+1} = y_n + h(sum_{j<k} w_j/j! + phi_k(a_n h).*w_k)
// which needs a single phi evaluation per entry. Both forms are kept because
// their agreement is a cheap end-to-end check of the weight table.
//
// Everything on the scalar level is templated so the same code runs on real
// state arrays and on complex scalars (used when extracting linear-recurrence
// coefficients for stability analysis).
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "exab/classical.hpp"
#include "exab/phi.hpp"
#include "exab/types.hpp"

namespace exab {

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

// Weights of g_{n-i} (column i) in gamma_{n,j} (row j-1), for order k.
// Row j-1 holds (j-1)! times the s^{j-1} coefficient of the degree-(k-1)
// interpolant through (s, g) = (0, g_n), (-1, g_{n-1}), ..., written in the
// scaled time s = (t - t_n)/h.
inline Eigen::MatrixXd gamma_table(int k) {
  if (k < 1 || k > 4) throw std::invalid_argument("gamma_table: order must be 1..4");
  Eigen::MatrixXd t(k, k);
  switch (k) {
    case 1:
      t << 1.0;
      break;
    case 2:
      t << 1.0, 0.0,
           1.0, -1.0;
      break;
    case 3:
      t << 1.0, 0.0, 0.0,
           1.5, -2.0, 0.5,
           1.0, -2.0, 1.0;
      break;
    default:
      t << 1.0, 0.0, 0.0, 0.0,
           11.0 / 6.0, -3.0, 1.5, -1.0 / 3.0,
           2.0, -5.0, 4.0, -1.0,
           1.0, -3.0, 3.0, -1.0;
      break;
  }
  return t;
}

// g_{n-i} for i = 0..k-1, newest first. Inputs are indexed newest first too.
template <typename Scalar>
std::vector<ArrayX<Scalar>> g_values(const std::vector<ArrayX<Scalar>>& y,
                                     const std::vector<ArrayX<Scalar>>& a,
                                     const std::vector<ArrayX<Scalar>>& b) {
  const size_t k = y.size();
  if (a.size() != k || b.size() != k || k == 0 || k > 4)
    throw std::invalid_argument("g_values: need 1..4 samples of y, a, b");
  std::vector<ArrayX<Scalar>> g(k);
  for (size_t i = 0; i < k; ++i) g[i] = b[i] + (a[i] - a[0]) * y[i];
  return g;
}

template <typename Scalar>
std::vector<ArrayX<Scalar>> gamma_coeffs(int k, const std::vector<ArrayX<Scalar>>& g) {
  if (static_cast<int>(g.size()) != k)
    throw std::invalid_argument("gamma_coeffs: wrong number of g values");
  const Eigen::MatrixXd table = gamma_table(k);
  std::vector<ArrayX<Scalar>> gamma(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    ArrayX<Scalar> acc = table(j, 0) * g[0];
    for (int i = 1; i < k; ++i) acc += table(j, i) * g[static_cast<size_t>(i)];
    gamma[static_cast<size_t>(j)] = std::move(acc);
  }
  return gamma;
}

// w-recursion form. gamma holds gamma_1..gamma_k.
template <typename Scalar>
ArrayX<Scalar> eab_combine(int k, double h, const ArrayX<Scalar>& a_n,
                           const ArrayX<Scalar>& y_n,
                           const std::vector<ArrayX<Scalar>>& gamma) {
  if (static_cast<int>(gamma.size()) != k)
    throw std::invalid_argument("eab_combine: wrong number of gamma values");
  ArrayX<Scalar> w = a_n * y_n + gamma[0];
  ArrayX<Scalar> acc = ArrayX<Scalar>::Zero(y_n.size());
  for (int j = 2; j <= k; ++j) {
    acc += w * Scalar(detail::kInvFactorial[static_cast<size_t>(j - 1)]);
    w = gamma[static_cast<size_t>(j - 1)] + (a_n * Scalar(h)) * w;
  }
  ArrayX<Scalar> phik(y_n.size());
  for (Eigen::Index i = 0; i < y_n.size(); ++i)
    phik[i] = phi_upto<Scalar>(a_n[i] * Scalar(h), k)[static_cast<size_t>(k)];
  return y_n + Scalar(h) * (acc + phik * w);
}

// Reference form evaluating every phi_j.
template <typename Scalar>
ArrayX<Scalar> eab_combine_direct(int k, double h, const ArrayX<Scalar>& a_n,
                                  const ArrayX<Scalar>& y_n,
                                  const std::vector<ArrayX<Scalar>>& gamma) {
  if (static_cast<int>(gamma.size()) != k)
    throw std::invalid_argument("eab_combine_direct: wrong number of gamma values");
  ArrayX<Scalar> out(y_n.size());
  for (Eigen::Index i = 0; i < y_n.size(); ++i) {
    const auto phi = phi_upto<Scalar>(a_n[i] * Scalar(h), k);
    Scalar s = phi[0] * y_n[i];
    for (int j = 1; j <= k; ++j)
      s += Scalar(h) * phi[static_cast<size_t>(j)] * gamma[static_cast<size_t>(j - 1)][i];
    out[i] = s;
  }
  return out;
}

namespace detail {

inline std::vector<ArrayX<double>> window_g_values(int k, const HistoryWindow& hist) {
  std::vector<ArrayX<double>> y(static_cast<size_t>(k)), a(static_cast<size_t>(k)),
      b(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    const auto& s = hist.newest(i);
    y[static_cast<size_t>(i)] = s.y.array();
    a[static_cast<size_t>(i)] = s.a.array();
    b[static_cast<size_t>(i)] = s.b.array();
  }
  return g_values<double>(y, a, b);
}

}  // namespace detail

inline StateVector eab_step(int k, double h, const HistoryWindow& hist) {
  if (hist.size() < k) throw std::invalid_argument("eab_step: history too short");
  const auto gamma = gamma_coeffs<double>(k, detail::window_g_values(k, hist));
  const auto& s = hist.newest();
  return eab_combine<double>(k, h, s.a.array(), s.y.array(), gamma).matrix();
}

inline StateVector eab_step_direct(int k, double h, const HistoryWindow& hist) {
  if (hist.size() < k) throw std::invalid_argument("eab_step_direct: history too short");
  const auto gamma = gamma_coeffs<double>(k, detail::window_g_values(k, hist));
  const auto& s = hist.newest();
  return eab_combine_direct<double>(k, h, s.a.array(), s.y.array(), gamma).matrix();
}

// Fills a history window with depth samples y_0..y_{depth-1} at spacing h,
// starting from y0 at t = 0. Startup values come from classical RK4 sub-stepped
// finely enough to stay inside its own stability region when h times the
// stabilizer scale is large; at small h this is plain RK4 at step h, keeping
// the startup error at the O(h^5) level the schemes need. Overflow is not
// checked here: non-finite states propagate into the window and are the
// caller's signal.
inline HistoryWindow bootstrap(const SplitSystem& sys, int depth, double h,
                               const StateVector& y0) {
  if (depth < 1 || depth > 4) throw std::invalid_argument("bootstrap: depth must be 1..4");
  if (h <= 0.0) throw std::invalid_argument("bootstrap: h must be positive");
  HistoryWindow hist(depth);
  DiagStabilizer a(sys.dim);
  StateVector b(sys.dim);
  sys.eval_ab(0.0, y0, a, b);
  hist.push(0.0, y0, a, b);
  StateVector y = y0;
  for (int n = 1; n < depth; ++n) {
    const double t0 = (n - 1) * h;
    const double scale = hist.newest().a.cwiseAbs().maxCoeff();
    const int substeps = static_cast<int>(
        std::min(1.0e6, std::max(1.0, std::ceil(h * std::max(1.0, scale)))));
    const double hs = h / substeps;
    for (int m = 0; m < substeps; ++m) y = rk4_step(sys, t0 + m * hs, y, hs);
    sys.eval_ab(n * h, y, a, b);
    hist.push(n * h, y, a, b);
  }
  return hist;
}

}  // namespace exab
