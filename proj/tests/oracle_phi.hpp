// High-precision series oracle for the phi functions, independent of the
// library implementation. phi_j(z) = sum_{m>=0} z^m/(m+j)! summed in MPFR
// arithmetic on (re, im) pairs.
//
// Working precision and term count are chosen from the argument size: the
// series for strongly negative re(z) cancels catastrophically (partial sums
// reach ~e^{|z|} while the value is ~e^{re z}), so |z| = 50 needs on the
// order of 45 extra decimal digits and terms well past m = |z|. 320 bits and
// the tail-driven term count below keep the oracle good to ~1e-60 relative
// for |z| <= 60, far below the 1e-12 comparisons it backs.
#pragma once

#include <complex>

#include <mpfr.h>

namespace oracle {

inline std::complex<double> phi_series(int j, std::complex<double> z) {
  const mpfr_prec_t prec = 320;
  const int terms = 80 + 4 * static_cast<int>(std::abs(z) + 1.0);
  mpfr_t zr, zi, tr, ti, sr, si, t1, t2, t3;
  mpfr_inits2(prec, zr, zi, tr, ti, sr, si, t1, t2, t3, (mpfr_ptr) nullptr);
  mpfr_set_d(zr, z.real(), MPFR_RNDN);
  mpfr_set_d(zi, z.imag(), MPFR_RNDN);

  // term = 1/j!, sum = term
  mpfr_set_ui(tr, 1, MPFR_RNDN);
  for (int m = 2; m <= j; ++m)
    mpfr_div_ui(tr, tr, static_cast<unsigned long>(m), MPFR_RNDN);
  mpfr_set_zero(ti, 1);
  mpfr_set(sr, tr, MPFR_RNDN);
  mpfr_set_zero(si, 1);

  for (int m = 1; m <= terms; ++m) {
    // term *= z / (m + j)
    mpfr_mul(t1, tr, zr, MPFR_RNDN);
    mpfr_mul(t2, ti, zi, MPFR_RNDN);
    mpfr_sub(t1, t1, t2, MPFR_RNDN);
    mpfr_mul(t3, tr, zi, MPFR_RNDN);
    mpfr_mul(t2, ti, zr, MPFR_RNDN);
    mpfr_add(t3, t3, t2, MPFR_RNDN);
    const unsigned long den = static_cast<unsigned long>(m + j);
    mpfr_div_ui(tr, t1, den, MPFR_RNDN);
    mpfr_div_ui(ti, t3, den, MPFR_RNDN);
    mpfr_add(sr, sr, tr, MPFR_RNDN);
    mpfr_add(si, si, ti, MPFR_RNDN);
  }

  const std::complex<double> out(mpfr_get_d(sr, MPFR_RNDN),
                                 mpfr_get_d(si, MPFR_RNDN));
  mpfr_clears(zr, zi, tr, ti, sr, si, t1, t2, t3, (mpfr_ptr) nullptr);
  return out;
}

inline double phi_series_real(int j, double x) {
  return phi_series(j, std::complex<double>(x, 0.0)).real();
}

}  // namespace oracle
