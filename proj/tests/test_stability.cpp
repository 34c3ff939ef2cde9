#include "exab/stability.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "exab/eab.hpp"
#include "oracles.hpp"

using Catch::Approx;
using Complex = std::complex<double>;
using exab::Grid1D;
using exab::Grid2D;

namespace {

// Linear-recurrence coefficients extracted from the step machinery itself:
// run one scalar complex step on the split y' = lambda y, a = theta lambda,
// b = (1 - theta) lambda y, with h = 1 and a unit impulse in history slot i.
// The result is the multiplier M_i of y_{n-i}, and the characteristic
// polynomial is xi^k - sum_i M_i xi^{k-1-i}. This route goes through
// g_values, the weight table and the direct phi combination, none of which
// the closed-form coefficient assembly shares beyond the table itself.
Eigen::VectorXcd impulse_poly_coeffs(int k, double theta, Complex z) {
  Eigen::VectorXcd c(k);
  for (int slot = 0; slot < k; ++slot) {
    std::vector<exab::ArrayX<Complex>> y(static_cast<size_t>(k)),
        a(static_cast<size_t>(k)), b(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      const Complex yi = (i == slot) ? Complex(1.0) : Complex(0.0);
      y[static_cast<size_t>(i)] = exab::ArrayX<Complex>::Constant(1, yi);
      a[static_cast<size_t>(i)] = exab::ArrayX<Complex>::Constant(1, theta * z);
      b[static_cast<size_t>(i)] =
          exab::ArrayX<Complex>::Constant(1, (1.0 - theta) * z * yi);
    }
    const auto gamma = exab::gamma_coeffs<Complex>(k, exab::g_values<Complex>(y, a, b));
    const Complex m =
        exab::eab_combine_direct<Complex>(k, 1.0, a[0], y[0], gamma)[0];
    c[slot] = -m;
  }
  return c;
}

}  // namespace

TEST_CASE("characteristic coefficients match the impulse response of a step") {
  std::mt19937_64 gen = oracle::rng(71);
  std::uniform_real_distribution<double> theta_d(0.3, 2.2);
  std::uniform_real_distribution<double> re_d(-20.0, 2.0);
  std::uniform_real_distribution<double> im_d(-20.0, 20.0);
  for (int k = 2; k <= 4; ++k) {
    for (int trial = 0; trial < 200; ++trial) {
      const double theta = theta_d(gen);
      const Complex z(re_d(gen), im_d(gen));
      const Eigen::VectorXcd got = exab::stability_poly_coeffs(k, theta, z);
      const Eigen::VectorXcd want = impulse_poly_coeffs(k, theta, z);
      REQUIRE(got.size() == k);
      for (int i = 0; i < k; ++i) {
        const double scale = std::max(1.0, std::abs(want[i]));
        INFO("k = " << k << " theta = " << theta << " z = " << z << " i = " << i);
        CHECK(std::abs(got[i] - want[i]) <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("order-2 characteristic coefficients match their printed closed form") {
  // c1 = -1 - z phi1(theta z) - (1-theta) z phi2(theta z),
  // c2 = (1-theta) z phi2(theta z); equivalent to the assembled form through
  // e^{theta z} = 1 + theta z phi1(theta z).
  std::mt19937_64 gen = oracle::rng(72);
  std::uniform_real_distribution<double> theta_d(0.2, 2.5);
  std::uniform_real_distribution<double> re_d(-25.0, 2.0);
  std::uniform_real_distribution<double> im_d(-25.0, 25.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double theta = theta_d(gen);
    const Complex z(re_d(gen), im_d(gen));
    const auto phi = exab::phi_upto<Complex>(theta * z, 2);
    const Complex c1 = -1.0 - z * phi[1] - (1.0 - theta) * z * phi[2];
    const Complex c2 = (1.0 - theta) * z * phi[2];
    const Eigen::VectorXcd c = exab::stability_poly_coeffs(2, theta, z);
    const double scale1 = std::max(1.0, std::abs(c1));
    const double scale2 = std::max(1.0, std::abs(c2));
    CHECK(std::abs(c[0] - c1) <= 1e-13 * scale1);
    CHECK(std::abs(c[1] - c2) <= 1e-13 * scale2);
  }
}

TEST_CASE("characteristic coefficients at full freeze and at z = 0") {
  for (int k = 2; k <= 4; ++k) {
    const Eigen::VectorXcd full = exab::stability_poly_coeffs(k, 1.0, Complex(-2.0, 1.0));
    CHECK(std::abs(full[0] + std::exp(Complex(-2.0, 1.0))) < 1e-14);
    for (int i = 1; i < k; ++i) CHECK(std::abs(full[i]) == 0.0);

    const Eigen::VectorXcd origin = exab::stability_poly_coeffs(k, 0.7, Complex(0.0));
    CHECK(std::abs(origin[0] + 1.0) < 1e-14);
    for (int i = 1; i < k; ++i) CHECK(std::abs(origin[i]) < 1e-14);
    CHECK(exab::rho(k, 0.7, Complex(0.0)) == Approx(1.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(exab::stability_poly_coeffs(1, 0.7, Complex(0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(exab::stability_poly_coeffs(2, 0.0, Complex(0.0)),
                  std::invalid_argument);
}

TEST_CASE("largest root modulus agrees with expanded root sets") {
  // Build polynomials from known roots and compare.
  std::mt19937_64 gen = oracle::rng(73);
  std::uniform_real_distribution<double> re_d(-1.2, 1.2);
  for (int k = 1; k <= 4; ++k) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Complex> roots(static_cast<size_t>(k));
      double want = 0.0;
      for (auto& r : roots) {
        r = Complex(re_d(gen), re_d(gen));
        want = std::max(want, std::abs(r));
      }
      // expand prod (xi - r_i) = xi^k + c[0] xi^{k-1} + ... + c[k-1]
      std::vector<Complex> poly = {Complex(1.0)};
      for (const Complex& r : roots) {
        std::vector<Complex> next(poly.size() + 1, Complex(0.0));
        for (size_t m = 0; m < poly.size(); ++m) {
          next[m] += poly[m];
          next[m + 1] -= poly[m] * r;
        }
        poly = std::move(next);
      }
      Eigen::VectorXcd c(k);
      for (int i = 0; i < k; ++i) c[i] = poly[static_cast<size_t>(i + 1)];
      CHECK(exab::max_root_modulus(c) == Approx(want).epsilon(1e-8).margin(1e-8));
    }
  }
  CHECK_THROWS_AS(exab::max_root_modulus(Eigen::VectorXcd(0)), std::invalid_argument);
  CHECK_THROWS_AS(exab::max_root_modulus(Eigen::VectorXcd(5)), std::invalid_argument);
}

TEST_CASE("full freeze has the exact exponential as its radius everywhere") {
  std::mt19937_64 gen = oracle::rng(74);
  std::uniform_real_distribution<double> re_d(-20.0, 3.0);
  std::uniform_real_distribution<double> im_d(-20.0, 20.0);
  for (int k = 2; k <= 4; ++k) {
    for (int trial = 0; trial < 300; ++trial) {
      const Complex z(re_d(gen), im_d(gen));
      CHECK(exab::rho(k, 1.0, z) ==
            Approx(std::exp(z.real())).epsilon(1e-10).margin(1e-300));
    }
  }
  CHECK(exab::rho(2, 1.0, Complex(-1.0)) == Approx(std::exp(-1.0)).epsilon(1e-13));
}

TEST_CASE("far-axis limit radius matches deep negative evaluations") {
  for (int k = 2; k <= 4; ++k) {
    for (double theta : {0.8, 0.95, 1.0, 1.1}) {
      const double lim = exab::rho_limit(k, theta);
      if (theta == 1.0) {
        CHECK(lim == 0.0);
      } else {
        CHECK(lim == Approx(exab::rho(k, theta, Complex(-1e8))).margin(2e-6));
      }
    }
  }
}

TEST_CASE("far-axis limit flips at the exact upper freeze thresholds") {
  // The limit polynomial crosses the unit root barrier at rational theta
  // values: 2 for order 3 and 5/4 for order 4.
  CHECK(exab::rho_limit(3, 2.0 - 1e-6) < 1.0);
  CHECK(exab::rho_limit(3, 2.0 + 1e-6) > 1.0);
  CHECK(std::abs(exab::rho_limit(3, 2.0) - 1.0) < 1e-5);
  CHECK(exab::rho_limit(4, 1.25 - 1e-6) < 1.0);
  CHECK(exab::rho_limit(4, 1.25 + 1e-6) > 1.0);
  CHECK(std::abs(exab::rho_limit(4, 1.25) - 1.0) < 1e-5);
  // order 2 keeps its limit below one for every theta past the lower onset
  CHECK(exab::rho_limit(2, 0.8) < 1.0);
  CHECK(exab::rho_limit(2, 5.0) < 1.0);
}

TEST_CASE("far-axis limit pins the lower onsets at 1 - 2^-k") {
  // At theta = 1 - 2^-k the limit polynomial has -1 as a root, so the
  // spectral radius equals one there and drops below on the stable side.
  CHECK(std::abs(exab::rho_limit(2, 0.75) - 1.0) < 5e-15);
  CHECK(std::abs(exab::rho_limit(3, 0.875) - 1.0) < 5e-15);
  CHECK(std::abs(exab::rho_limit(4, 0.9375) - 1.0) < 5e-15);
  CHECK(exab::rho_limit(2, 0.75 - 1e-3) > 1.0);
  CHECK(exab::rho_limit(2, 0.75 + 1e-3) < 1.0);
  CHECK(exab::rho_limit(3, 0.875 - 1e-3) > 1.0);
  CHECK(exab::rho_limit(3, 0.875 + 1e-3) < 1.0);
  CHECK(exab::rho_limit(4, 0.9375 - 1e-3) > 1.0);
  CHECK(exab::rho_limit(4, 0.9375 + 1e-3) < 1.0);
}

TEST_CASE("negative-axis scan classifies freeze fractions") {
  struct Case {
    int k;
    double theta;
    bool stable;
  };
  const Case cases[] = {
      {2, 0.74, false}, {2, 0.75, false}, {2, 0.76, true}, {2, 0.9, true},
      {2, 1.0, true},   {3, 0.87, false}, {3, 0.88, true}, {3, 1.9, true},
      {3, 2.0, false},  {3, 1.0, true},   {4, 0.93, false}, {4, 0.94, true},
      {4, 1.2, true},   {4, 1.3, false},  {4, 1.0, true},
  };
  for (const auto& c : cases) {
    INFO("k = " << c.k << " theta = " << c.theta);
    CHECK(exab::scan_a0(c.k, c.theta) == c.stable);
  }
}

TEST_CASE("negative-axis scan validates its grid") {
  Grid1D bad;
  bad.dx = 0.0;
  CHECK_THROWS_AS(exab::scan_a0(2, 1.0, bad), std::invalid_argument);
  bad = Grid1D{};
  bad.z_max = 1.0;
  CHECK_THROWS_AS(exab::scan_a0(2, 1.0, bad), std::invalid_argument);
  bad = Grid1D{};
  bad.z_min = 0.0;
  CHECK_THROWS_AS(exab::scan_a0(2, 1.0, bad), std::invalid_argument);
}

TEST_CASE("freeze threshold search brackets the order-2 onset") {
  const auto thresholds = exab::find_theta_thresholds(2, 0.5, 1.5, 1e-3);
  CHECK_FALSE(exab::scan_a0(2, thresholds.lower.unstable));
  CHECK(exab::scan_a0(2, thresholds.lower.stable));
  CHECK(thresholds.lower.stable - thresholds.lower.unstable <= 1e-3 + 1e-12);
  // Onset sits at the rational 3/4; the boundary itself counts as unstable.
  CHECK(thresholds.lower.unstable > 0.749);
  CHECK(thresholds.lower.unstable <= 0.75 + 1e-12);
  CHECK(thresholds.lower.stable > 0.75 - 1e-12);
  CHECK(thresholds.lower.stable < 0.752);
  CHECK_FALSE(thresholds.upper.has_value());
}

TEST_CASE("freeze threshold search finds both order-3 transitions") {
  // Coarser grid keeps this quick; the acceptance run uses the full grid.
  Grid1D grid;
  grid.dx = 0.05;
  const auto thresholds = exab::find_theta_thresholds(3, 0.8, 2.2, 1e-3, grid);
  // Both transitions are pinned by the far-axis limit at rationals 7/8 and 2.
  CHECK(thresholds.lower.unstable > 0.873);
  CHECK(thresholds.lower.stable < 0.877);
  REQUIRE(thresholds.upper.has_value());
  CHECK(thresholds.upper->stable < thresholds.upper->unstable);
  CHECK(thresholds.upper->stable > 1.9989);
  CHECK(thresholds.upper->unstable < 2.0011);
  CHECK(exab::scan_a0(3, thresholds.upper->stable, grid));
  CHECK_FALSE(exab::scan_a0(3, thresholds.upper->unstable, grid));
}

TEST_CASE("freeze threshold search finds both order-4 transitions") {
  Grid1D grid;
  grid.dx = 0.05;
  const auto thresholds = exab::find_theta_thresholds(4, 0.9, 1.4, 1e-3, grid);
  // Transitions at the rationals 15/16 and 5/4.
  CHECK(thresholds.lower.unstable > 0.936);
  CHECK(thresholds.lower.stable < 0.939);
  REQUIRE(thresholds.upper.has_value());
  CHECK(thresholds.upper->stable > 1.2489);
  CHECK(thresholds.upper->unstable < 1.2511);
}

TEST_CASE("freeze threshold search reports unusable intervals") {
  CHECK_THROWS_AS(exab::find_theta_thresholds(2, 0.9, 1.2, 1e-3),
                  std::runtime_error);
  CHECK_THROWS_AS(exab::find_theta_thresholds(2, 0.1, 0.3, 1e-3),
                  std::runtime_error);
  CHECK_THROWS_AS(exab::find_theta_thresholds(2, 1.2, 0.9, 1e-3),
                  std::invalid_argument);
}

TEST_CASE("rectangle sampling lays out nodes row by row") {
  Grid2D grid;
  grid.re_min = -2.0;
  grid.re_max = 0.0;
  grid.im_min = 0.0;
  grid.im_max = 1.0;
  grid.dx = 0.5;
  const auto result = exab::stability_grid(3, 0.9, grid, 2);
  REQUIRE(result.nx == 5);
  REQUIRE(result.ny == 3);
  for (int iy = 0; iy < result.ny; ++iy) {
    for (int ix = 0; ix < result.nx; ++ix) {
      const Complex z(grid.re_min + ix * grid.dx, grid.im_min + iy * grid.dx);
      CHECK(result.rho(iy, ix) == exab::rho(3, 0.9, z));
    }
  }
  const auto serial = exab::stability_grid(3, 0.9, grid, 1);
  CHECK((serial.rho - result.rho).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("order-2 admissibility factor hits its special values") {
  // At h|a| = 1 the factor cancels to exactly zero in floating point.
  CHECK(exab::eab2_positivity_cp(1.0, -1.0) == 0.0);
  // Independent assembly from expm1: phi2(z) = (expm1(z) - z)/z^2.
  const double z = -0.5;
  const double phi2 = (std::expm1(z) - z) / (z * z);
  CHECK(exab::eab2_positivity_cp(0.5, -1.0) ==
        Approx(std::exp(z) + z * phi2).epsilon(1e-14));
  CHECK(exab::eab2_positivity_cp(0.5, -1.0) ==
        Approx(0.393469340287366).epsilon(1e-12));
}

TEST_CASE("order-2 positivity admission") {
  // Step bound first: h|a| > 1 is rejected regardless of the data.
  CHECK_FALSE(exab::positivity_check_eab2(1.5, -1.0, 0.5, 0.25, 0.0, 1.0));
  CHECK(exab::positivity_check_eab2(0.5, -1.0, 0.5, 0.25, 0.0, 1.0));
  // Same step, startup state too high for the admissible window.
  CHECK_FALSE(exab::positivity_check_eab2(0.5, -1.0, 1.0, 0.25, 0.0, 1.0));
  // a = 0 keeps the flow affine; the window check still applies.
  CHECK(exab::positivity_check_eab2(0.5, 0.0, 0.5, 0.25, 0.0, 1.0));
  CHECK_THROWS_AS(exab::positivity_check_eab2(0.0, -1.0, 0.5, 0.25, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(exab::positivity_check_eab2(0.5, 1.0, 0.5, 0.25, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(exab::positivity_check_eab2(0.5, -1.0, 0.5, 0.25, 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("order-3 positivity admission") {
  // h = 0.33 sits under the step constant for a = -1; 0.34 does not.
  CHECK(exab::positivity_check_eab3(0.33, -1.0, 0.3, 0.2, 0.0, 1.0));
  CHECK_FALSE(exab::positivity_check_eab3(0.34, -1.0, 0.3, 0.2, 0.0, 1.0));
  // Startup state outside the admissible window at an allowed step.
  CHECK_FALSE(exab::positivity_check_eab3(0.33, -1.0, 0.95, 0.0, 0.0, 1.0));
  const double z = -0.33;
  const auto phi = exab::phi_upto<double>(z, 3);
  const double start = phi[0] * 0.3 - 2.0 * 0.33 * (phi[2] + phi[3]) * 0.2;
  CHECK(start == Approx(0.1360771251696717).epsilon(1e-12));
  CHECK(exab::eab3_positivity_cp(0.33, -1.0) ==
        Approx(0.32092375913239535).epsilon(1e-12));
}

TEST_CASE("order-3 step constant comes from the sign change of psi") {
  const double b3 = exab::compute_beta3(1e-12);
  CHECK(b3 == Approx(0.331).margin(0.005));
  CHECK(b3 == Approx(0.33098808508366356).margin(1e-10));
  // psi is positive just inside and negative just outside.
  auto psi = [](double zz) {
    const auto phi = exab::phi_upto<double>(zz, 3);
    return phi[1] * phi[0] + phi[2] * (1.5 * phi[0] - 2.0) +
           phi[3] * (phi[0] - 2.0);
  };
  CHECK(psi(0.0) == Approx(7.0 / 12.0).epsilon(1e-14));
  CHECK(psi(-(b3 - 0.01)) > 0.0);
  CHECK(psi(-(b3 + 0.01)) < 0.0);
  CHECK(exab::beta3() == Approx(b3).margin(1e-11));
  CHECK(exab::beta3() == exab::beta3());
  CHECK_THROWS_AS(exab::compute_beta3(0.0), std::invalid_argument);
}
