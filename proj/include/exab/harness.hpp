// Experiment drivers: trajectory integration with failure detection, cubic
// projection onto a reference grid, the relative max-norm error on the last
// state component, convergence studies against an RK4 reference, and the
// critical-time-step bisection.
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "exab/classical.hpp"
#include "exab/types.hpp"

namespace exab {

struct IntegrateOptions {
  // A run fails once any state magnitude exceeds this cap or turns non-finite.
  double overflow_cap = 1e10;
  // Full states are large at reference resolutions; by default only the last
  // component (the potential for membrane models) is kept per node.
  bool record_full_states = false;
  NewtonConfig newton{};
};

struct RunRecord {
  SchemeSpec scheme{Family::RK4, 4};
  double h = 0.0;
  std::vector<double> times;
  std::vector<double> v;                  // last state component per node
  std::vector<StateVector> states;        // filled iff record_full_states
  StateVector final_state;                // last recorded node
  bool overflowed = false;
  int solver_failures = 0;
  double wall_time_seconds = 0.0;

  bool failed() const { return overflowed || solver_failures > 0; }
};

// Steps scheme over [0, round(T/h) steps] from y0: bootstrap to the scheme's
// history depth, then repeated stepping. Halts early on overflow or an
// implicit-solver failure; the record carries which.
RunRecord integrate(const SchemeSpec& scheme, const SplitSystem& sys,
                    const StateVector& y0, double h, double T,
                    const IntegrateOptions& opts = {});

// Piecewise-cubic projection of uniformly spaced samples (spacing h, first
// sample at the grid origin) onto the grid of spacing h_ref. h must equal
// 2^p * h_ref up to roundoff, p >= 0; throws std::invalid_argument otherwise.
// Each group of 3 consecutive steps defines one cubic through its 4 nodes; a
// trailing remainder of 1-2 steps is dropped. Output length is
// 3*floor((n-1)/3)*2^p + 1 for n input samples.
std::vector<double> project_cubic(const std::vector<double>& samples, double h,
                                  double h_ref);
std::vector<double> project_cubic(const RunRecord& run, double h_ref);

// max_i |reference_i - projected_i| / max_i |reference_i| over the common
// prefix of the two sequences.
double error_metric(const std::vector<double>& projected,
                    const std::vector<double>& reference);

struct ErrorReport {
  SchemeSpec scheme{Family::RK4, 4};
  double h = 0.0;
  double e_h = 0.0;
  bool run_failed = false;
  // log2(e(2h)/e(h)) when the study also ran the same scheme at 2h.
  std::optional<double> estimated_order;
};

// One RK4 reference run at h_ref, then every (scheme, h) pair: integrate,
// project, score. h_list is processed in descending order per scheme and
// orders are estimated between consecutive halved steps.
std::vector<ErrorReport> convergence_study(const std::vector<SchemeSpec>& schemes,
                                           const SplitSystem& sys,
                                           const StateVector& y0,
                                           std::vector<double> h_list,
                                           double h_ref, double T,
                                           const IntegrateOptions& opts = {});

// Study for a rhs that switches at known instants (see SmoothPiece). Every
// run, the reference included, restarts at each window edge and every window
// is projected and scored on its own, so no history, stage, or interpolant
// spans a switch; e_h is the worst window score. Stepping a switch inside a
// window instead costs a full order: the history polynomial misreads the jump.
// Window lengths must be whole step multiples at least 3 steps long, else
// std::invalid_argument.
std::vector<ErrorReport> convergence_study(const std::vector<SchemeSpec>& schemes,
                                           const std::vector<SmoothPiece>& pieces,
                                           const StateVector& y0,
                                           std::vector<double> h_list,
                                           double h_ref,
                                           const IntegrateOptions& opts = {});

// Thrown when the bisection bracket is invalid: the run at h_lo already
// fails, or the run at h_hi succeeds (no finite critical step below the cap).
struct BracketError : std::runtime_error {
  enum class Side { kLowFails, kHighSucceeds };
  BracketError(Side which, const std::string& msg)
      : std::runtime_error(msg), side(which) {}
  Side side;
};

// Largest stable step by bisection: precondition success at h_lo and failure
// at h_hi (else BracketError); returns the bracket midpoint once the bracket
// width drops below tol.
double critical_time_step(const SchemeSpec& scheme, const SplitSystem& sys,
                          const StateVector& y0, double T, double h_lo,
                          double h_hi, double tol,
                          const IntegrateOptions& opts = {});

}  // namespace exab
