#include "exab/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>

#include "exab/eab.hpp"
#include "exab/ieab.hpp"

namespace exab {

namespace {

bool state_ok(const StateVector& y, double cap) {
  return y.allFinite() && y.cwiseAbs().maxCoeff() <= cap;
}

}  // namespace

RunRecord integrate(const SchemeSpec& scheme, const SplitSystem& sys,
                    const StateVector& y0, double h, double T,
                    const IntegrateOptions& opts) {
  if (!(h > 0.0) || !(T > 0.0))
    throw std::invalid_argument("integrate: h and T must be positive");
  if (y0.size() != sys.dim)
    throw std::invalid_argument("integrate: y0 dimension mismatch");

  const auto t_start = std::chrono::steady_clock::now();
  const int depth = history_depth(scheme);
  const long n_steps = std::lround(T / h);

  RunRecord rec;
  rec.scheme = scheme;
  rec.h = h;
  rec.times.reserve(static_cast<size_t>(n_steps) + 1);
  rec.v.reserve(static_cast<size_t>(n_steps) + 1);

  auto record = [&](double t, const StateVector& y) {
    rec.times.push_back(t);
    rec.v.push_back(y[sys.dim - 1]);
    if (opts.record_full_states) rec.states.push_back(y);
    rec.final_state = y;
  };
  auto finish = [&] {
    rec.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return rec;
  };

  if (scheme.family == Family::RK4) {
    StateVector y = y0;
    record(0.0, y);
    for (long n = 0; n < n_steps; ++n) {
      y = rk4_step(sys, n * h, y, h);
      if (!state_ok(y, opts.overflow_cap)) {
        rec.overflowed = true;
        return finish();
      }
      record((n + 1) * h, y);
    }
    return finish();
  }

  HistoryWindow hist = bootstrap(sys, depth, h, y0);
  for (int i = depth - 1; i >= 0; --i) {
    const auto& s = hist.newest(i);
    if (!state_ok(s.y, opts.overflow_cap)) {
      rec.overflowed = true;
      return finish();
    }
    record(s.t, s.y);
  }

  DiagStabilizer a(sys.dim);
  StateVector b(sys.dim);
  for (long n = depth - 1; n < n_steps; ++n) {
    const double t_new = (n + 1) * h;
    StateVector y_new;
    switch (scheme.family) {
      case Family::EAB:
        y_new = eab_step(scheme.order, h, hist);
        break;
      case Family::IEAB:
        y_new = ieab_step(scheme.order, h, hist);
        break;
      case Family::AB:
        y_new = ab_step(scheme.order, h, hist);
        break;
      case Family::BDF: {
        ImplicitStepResult r = bdf_step(scheme.order, h, sys, hist, opts.newton);
        if (!r.converged) {
          ++rec.solver_failures;
          return finish();
        }
        y_new = std::move(r.y);
        break;
      }
      case Family::RK4:
        break;  // handled above
    }
    if (!state_ok(y_new, opts.overflow_cap)) {
      rec.overflowed = true;
      return finish();
    }
    sys.eval_ab(t_new, y_new, a, b);
    hist.push(t_new, y_new, a, b);
    record(t_new, y_new);
  }
  return finish();
}

std::vector<double> project_cubic(const std::vector<double>& samples, double h,
                                  double h_ref) {
  if (!(h > 0.0) || !(h_ref > 0.0))
    throw std::invalid_argument("project_cubic: steps must be positive");
  const double ratio_real = h / h_ref;
  const long ratio = std::lround(ratio_real);
  if (ratio < 1 || std::abs(ratio_real - ratio) > 1e-9 * ratio ||
      (ratio & (ratio - 1)) != 0) {
    throw std::invalid_argument(
        "project_cubic: h must be a power-of-two multiple of h_ref");
  }
  if (samples.size() < 4)
    throw std::invalid_argument("project_cubic: need at least 4 samples");

  const long blocks = (static_cast<long>(samples.size()) - 1) / 3;
  const long out_per_block = 3 * ratio;

  // Cubic Lagrange weights at the evaluation offsets s = m/ratio, s in [0,3),
  // shared by every block.
  std::vector<std::array<double, 4>> weights(static_cast<size_t>(out_per_block));
  for (long m = 0; m < out_per_block; ++m) {
    const double s = 3.0 * static_cast<double>(m) / out_per_block;
    weights[static_cast<size_t>(m)] = {
        -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0,
        s * (s - 2.0) * (s - 3.0) / 2.0,
        -s * (s - 1.0) * (s - 3.0) / 2.0,
        s * (s - 1.0) * (s - 2.0) / 6.0,
    };
  }

  std::vector<double> out(static_cast<size_t>(blocks * out_per_block) + 1);
  for (long blk = 0; blk < blocks; ++blk) {
    const double* y = samples.data() + 3 * blk;
    double* o = out.data() + blk * out_per_block;
    for (long m = 0; m < out_per_block; ++m) {
      const auto& w = weights[static_cast<size_t>(m)];
      o[m] = w[0] * y[0] + w[1] * y[1] + w[2] * y[2] + w[3] * y[3];
    }
  }
  out.back() = samples[static_cast<size_t>(3 * blocks)];
  return out;
}

std::vector<double> project_cubic(const RunRecord& run, double h_ref) {
  return project_cubic(run.v, run.h, h_ref);
}

double error_metric(const std::vector<double>& projected,
                    const std::vector<double>& reference) {
  const size_t n = std::min(projected.size(), reference.size());
  if (n == 0) throw std::invalid_argument("error_metric: empty input");
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < n; ++i) {
    num = std::max(num, std::abs(reference[i] - projected[i]));
    den = std::max(den, std::abs(reference[i]));
  }
  if (den == 0.0) throw std::invalid_argument("error_metric: zero reference");
  return num / den;
}

std::vector<ErrorReport> convergence_study(const std::vector<SchemeSpec>& schemes,
                                           const SplitSystem& sys,
                                           const StateVector& y0,
                                           std::vector<double> h_list,
                                           double h_ref, double T,
                                           const IntegrateOptions& opts) {
  return convergence_study(schemes, std::vector<SmoothPiece>{{sys, T}}, y0,
                           std::move(h_list), h_ref, opts);
}

namespace {

// Window lengths must land on whole steps: a rounded step count would shift
// every later window edge off the switch it is meant to sit on.
long window_steps(double len, double h) {
  const long n = std::lround(len / h);
  if (n < 3 || std::abs(static_cast<double>(n) * h - len) >
                   1e-9 * std::max(1.0, len)) {
    throw std::invalid_argument(
        "convergence_study: window length must be a whole step multiple, "
        "at least 3 steps");
  }
  return n;
}

}  // namespace

std::vector<ErrorReport> convergence_study(const std::vector<SchemeSpec>& schemes,
                                           const std::vector<SmoothPiece>& pieces,
                                           const StateVector& y0,
                                           std::vector<double> h_list,
                                           double h_ref,
                                           const IntegrateOptions& opts) {
  if (pieces.empty())
    throw std::invalid_argument("convergence_study: no pieces");
  for (size_t w = 0; w + 1 < pieces.size(); ++w) {
    if (!(pieces[w].t_end < pieces[w + 1].t_end))
      throw std::invalid_argument("convergence_study: pieces must increase");
  }
  std::sort(h_list.begin(), h_list.end(), std::greater<double>());

  std::vector<RunRecord> ref;
  ref.reserve(pieces.size());
  {
    StateVector y = y0;
    double t0 = 0.0;
    for (const auto& piece : pieces) {
      const double len = piece.t_end - t0;
      window_steps(len, h_ref);
      ref.push_back(integrate(make_scheme(Family::RK4, 4), piece.sys, y, h_ref,
                              len, opts));
      if (ref.back().failed())
        throw std::runtime_error("convergence_study: reference run failed");
      y = ref.back().final_state;
      t0 = piece.t_end;
    }
  }

  std::vector<ErrorReport> reports;
  for (const auto& scheme : schemes) {
    std::optional<double> prev_e;
    double prev_h = 0.0;
    for (double h : h_list) {
      ErrorReport rep;
      rep.scheme = scheme;
      rep.h = h;
      StateVector y = y0;
      double t0 = 0.0;
      double worst = 0.0;
      for (size_t w = 0; w < pieces.size(); ++w) {
        const double len = pieces[w].t_end - t0;
        window_steps(len, h);
        const RunRecord run = integrate(scheme, pieces[w].sys, y, h, len, opts);
        if (run.failed()) {
          rep.run_failed = true;
          break;
        }
        worst = std::max(worst,
                         error_metric(project_cubic(run, h_ref), ref[w].v));
        y = run.final_state;
        t0 = pieces[w].t_end;
      }
      if (rep.run_failed) {
        rep.e_h = std::numeric_limits<double>::infinity();
        prev_e.reset();
      } else {
        rep.e_h = worst;
        if (prev_e && std::abs(prev_h - 2.0 * h) < 1e-9 * h && rep.e_h > 0.0) {
          rep.estimated_order = std::log2(*prev_e / rep.e_h);
        }
        prev_e = rep.e_h;
        prev_h = h;
      }
      reports.push_back(std::move(rep));
    }
  }
  return reports;
}

double critical_time_step(const SchemeSpec& scheme, const SplitSystem& sys,
                          const StateVector& y0, double T, double h_lo,
                          double h_hi, double tol, const IntegrateOptions& opts) {
  if (!(h_lo > 0.0) || !(h_lo < h_hi) || !(tol > 0.0))
    throw std::invalid_argument("critical_time_step: bad bracket or tol");
  auto fails = [&](double h) {
    return integrate(scheme, sys, y0, h, T, opts).failed();
  };
  if (fails(h_lo))
    throw BracketError(BracketError::Side::kLowFails,
                       "critical_time_step: run already fails at h_lo");
  if (!fails(h_hi))
    throw BracketError(BracketError::Side::kHighSucceeds,
                       "critical_time_step: run still succeeds at h_hi");
  while (h_hi - h_lo > tol) {
    const double mid = 0.5 * (h_lo + h_hi);
    (fails(mid) ? h_hi : h_lo) = mid;
  }
  return 0.5 * (h_lo + h_hi);
}

}  // namespace exab
