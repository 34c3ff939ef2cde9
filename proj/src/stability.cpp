#include "exab/stability.hpp"

#include <cmath>
#include <stdexcept>

#include "exab/eab.hpp"
#include "exab/parallel.hpp"
#include "exab/phi.hpp"

namespace exab {

namespace {

using Complex = std::complex<double>;

void require_order(int k) {
  if (k < 2 || k > 4)
    throw std::invalid_argument("stability: order must be 2..4");
}

void require_theta(double theta) {
  if (!(theta > 0.0))
    throw std::invalid_argument("stability: theta must be positive");
}

}  // namespace

Eigen::VectorXcd stability_poly_coeffs(int k, double theta, Complex z) {
  require_order(k);
  require_theta(theta);
  const Eigen::MatrixXd table = gamma_table(k);
  const auto phi = phi_upto<Complex>(theta * z, k);
  Eigen::VectorXcd c(k);
  const Complex lead = (1.0 - theta) * z;
  for (int i = 0; i < k; ++i) {
    Complex ci = 0.0;
    for (int j = 1; j <= k; ++j) ci += phi[static_cast<size_t>(j)] * table(j - 1, i);
    c[i] = -lead * ci;
  }
  c[0] -= phi[0];  // phi_0 = e^{theta z}, the propagated y_n term
  return c;
}

double max_root_modulus(const Eigen::VectorXcd& cin) {
  int k = static_cast<int>(cin.size());
  if (k < 1 || k > 4)
    throw std::invalid_argument("max_root_modulus: degree must be 1..4");
  // Exact trailing zeros are roots at the origin; deflating them keeps a tiny
  // surviving root accurate where the eigensolver's absolute error would
  // otherwise dominate it (the fully frozen scheme has c = (-e^z, 0, ..., 0)).
  while (k > 1 && cin[k - 1] == 0.0) --k;
  const Eigen::VectorXcd c = cin.head(k);
  if (k == 1) return std::abs(c[0]);
  if (k == 2) {
    const Complex disc = std::sqrt(c[0] * c[0] - 4.0 * c[1]);
    return 0.5 * std::max(std::abs(-c[0] + disc), std::abs(-c[0] - disc));
  }
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(k, k);
  for (int i = 1; i < k; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < k; ++i) comp(i, k - 1) = -c[k - 1 - i];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double rho(int k, double theta, Complex z) {
  return max_root_modulus(stability_poly_coeffs(k, theta, z));
}

double rho_limit(int k, double theta) {
  require_order(k);
  require_theta(theta);
  const Eigen::MatrixXd table = gamma_table(k);
  const double u = (1.0 - theta) / theta;
  Eigen::VectorXcd c(k);
  for (int i = 0; i < k; ++i) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j)
      s += table(j - 1, i) * detail::kInvFactorial[static_cast<size_t>(j - 1)];
    c[i] = u * s;
  }
  return max_root_modulus(c);
}

bool scan_a0(int k, double theta, const Grid1D& grid) {
  require_order(k);
  require_theta(theta);
  if (!(grid.dx > 0.0) || !(grid.z_min < grid.z_max) || grid.z_max > 0.0)
    throw std::invalid_argument("scan_a0: bad grid");
  // A limit root within rounding of the unit circle is not damped; the tie
  // tolerance keeps the classification deterministic where the limit
  // polynomial has a root exactly on the circle (rational thresholds).
  if (rho_limit(k, theta) >= 1.0 - 4e-15) return false;
  const int n = static_cast<int>(std::lround((grid.z_max - grid.z_min) / grid.dx));
  for (int i = 0; i <= n; ++i) {
    const double z = grid.z_min + i * grid.dx;
    if (z >= -0.5 * grid.dx) break;  // z = 0 always has rho = 1
    if (rho(k, theta, Complex(z, 0.0)) >= 1.0) return false;
  }
  return true;
}

namespace {

ThetaBracket bisect_transition(int k, double lo, bool lo_stable, double hi,
                               double tol, const Grid1D& grid) {
  // Invariant: scan differs between lo and hi.
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (scan_a0(k, mid, grid) == lo_stable)
      lo = mid;
    else
      hi = mid;
  }
  return lo_stable ? ThetaBracket{hi, lo} : ThetaBracket{lo, hi};
}

}  // namespace

ThetaThresholds find_theta_thresholds(int k, double theta_lo, double theta_hi,
                                      double tol, const Grid1D& grid) {
  require_order(k);
  require_theta(theta_lo);
  if (!(theta_lo < theta_hi) || !(tol > 0.0))
    throw std::invalid_argument("find_theta_thresholds: bad interval or tol");

  const double step = std::min(0.05, (theta_hi - theta_lo) / 8.0);
  if (scan_a0(k, theta_lo, grid))
    throw std::runtime_error(
        "find_theta_thresholds: already stable at interval start, lower "
        "threshold not bracketed");

  double prev = theta_lo;
  double cur = prev;
  bool found = false;
  while (cur < theta_hi) {
    cur = std::min(theta_hi, cur + step);
    if (scan_a0(k, cur, grid)) {
      found = true;
      break;
    }
    prev = cur;
  }
  if (!found)
    throw std::runtime_error(
        "find_theta_thresholds: no stable theta in the search interval");

  ThetaThresholds out;
  out.lower = bisect_transition(k, prev, false, cur, tol, grid);

  // Walk on from the stable side looking for the loss of stability.
  prev = cur;
  while (cur < theta_hi) {
    cur = std::min(theta_hi, cur + step);
    if (!scan_a0(k, cur, grid)) {
      const ThetaBracket b = bisect_transition(k, prev, true, cur, tol, grid);
      out.upper = ThetaBracket{b.unstable, b.stable};
      return out;
    }
    prev = cur;
  }
  return out;  // stable through theta_hi: no upper threshold in the interval
}

StabilityGrid stability_grid(int k, double theta, const Grid2D& grid,
                             int threads) {
  require_order(k);
  require_theta(theta);
  if (!(grid.dx > 0.0) || grid.re_min > grid.re_max || grid.im_min > grid.im_max)
    throw std::invalid_argument("stability_grid: bad grid");
  StabilityGrid out;
  out.spec = grid;
  out.nx = static_cast<int>(std::lround((grid.re_max - grid.re_min) / grid.dx)) + 1;
  out.ny = static_cast<int>(std::lround((grid.im_max - grid.im_min) / grid.dx)) + 1;
  out.rho.resize(out.ny, out.nx);
  auto& rho_mat = out.rho;
  parallel_for(
      out.ny,
      [&](int iy) {
        const double im = grid.im_min + iy * grid.dx;
        for (int ix = 0; ix < out.nx; ++ix) {
          const double re = grid.re_min + ix * grid.dx;
          rho_mat(iy, ix) = rho(k, theta, Complex(re, im));
        }
      },
      threads);
  return out;
}

namespace {

void require_positivity_args(double h, double a, double K1, double K2) {
  if (!(h > 0.0)) throw std::invalid_argument("positivity: h must be positive");
  if (a > 0.0) throw std::invalid_argument("positivity: a must be <= 0");
  if (K1 > K2) throw std::invalid_argument("positivity: need K1 <= K2");
}

}  // namespace

double eab2_positivity_cp(double h, double a) {
  const auto phi = phi_upto<double>(a * h, 2);
  return phi[0] + a * h * phi[2];
}

double eab3_positivity_cp(double h, double a) {
  const auto phi = phi_upto<double>(a * h, 3);
  return phi[0] + 2.0 * a * h * (phi[2] + phi[3]);
}

bool positivity_check_eab2(double h, double a, double y1, double b0, double K1,
                           double K2) {
  require_positivity_args(h, a, K1, K2);
  if (a < 0.0 && h > 1.0 / -a) return false;
  const auto phi = phi_upto<double>(a * h, 2);
  const double cp = phi[0] + a * h * phi[2];
  const double start = phi[0] * y1 - h * phi[2] * b0;
  return cp * K1 <= start && start <= cp * K2;
}

bool positivity_check_eab3(double h, double a, double y2, double b1, double K1,
                           double K2) {
  require_positivity_args(h, a, K1, K2);
  if (a < 0.0 && h > beta3() / -a) return false;
  const auto phi = phi_upto<double>(a * h, 3);
  const double cp = phi[0] + 2.0 * a * h * (phi[2] + phi[3]);
  const double start = phi[0] * y2 - 2.0 * h * (phi[2] + phi[3]) * b1;
  return cp * K1 <= start && start <= cp * K2;
}

namespace {

double psi(double z) {
  const auto phi = phi_upto<double>(z, 3);
  const double ez = phi[0];
  return phi[1] * ez + phi[2] * (1.5 * ez - 2.0) + phi[3] * (ez - 2.0);
}

}  // namespace

double compute_beta3(double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("compute_beta3: tol must be positive");
  // psi(0) = 7/12 > 0; walk out to the first sign change, then bisect.
  double lo = 0.0;
  double hi = 0.0;
  for (double s = 0.05; s <= 4.0; s += 0.05) {
    if (psi(-s) < 0.0) {
      hi = s;
      break;
    }
    lo = s;
  }
  if (hi == 0.0) throw std::runtime_error("compute_beta3: no sign change found");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (psi(-mid) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double beta3() {
  static const double value = compute_beta3(1e-14);
  return value;
}

}  // namespace exab
