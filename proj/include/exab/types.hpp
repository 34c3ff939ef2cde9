// Core vocabulary for split systems y' = a(t,y).*y + b(t,y) with a diagonal
// stabilizer, plus the shared step-history buffer used by the multistep schemes.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace exab {

using StateVector = Eigen::VectorXd;

// Diagonal stabilizer stored as the vector of diagonal entries.
using DiagStabilizer = Eigen::VectorXd;

// Right-hand side split f(t,y) = a(t,y).*y + b(t,y).
// eval_f defaults to composing a and b; models may install an independently
// computed f so that the split can be cross-checked against it.
struct SplitSystem {
  int dim = 0;
  std::function<void(double, const StateVector&, DiagStabilizer&)> eval_a;
  std::function<void(double, const StateVector&, StateVector&)> eval_b;
  std::function<StateVector(double, const StateVector&)> eval_f_independent;

  void eval_ab(double t, const StateVector& y, DiagStabilizer& a, StateVector& b) const {
    eval_a(t, y, a);
    eval_b(t, y, b);
  }

  StateVector eval_f(double t, const StateVector& y) const {
    if (eval_f_independent) return eval_f_independent(t, y);
    DiagStabilizer a(dim);
    StateVector b(dim);
    eval_ab(t, y, a, b);
    return a.cwiseProduct(y) + b;
  }
};

// One smooth piece of a right-hand side that switches at known instants: sys
// holds on the closed window ending at t_end and the next piece takes over
// past it. Pieces with increasing t_end tile [0, back().t_end].
struct SmoothPiece {
  SplitSystem sys;
  double t_end = 0.0;
};

// True iff max-norm(f - (a.*y + b)) <= tol * (1 + max-norm(f)).
inline bool consistency_check(const SplitSystem& sys, double t, const StateVector& y,
                              double tol) {
  DiagStabilizer a(sys.dim);
  StateVector b(sys.dim);
  sys.eval_ab(t, y, a, b);
  const StateVector f = sys.eval_f(t, y);
  const double gap = (f - (a.cwiseProduct(y) + b)).cwiseAbs().maxCoeff();
  return gap <= tol * (1.0 + f.cwiseAbs().maxCoeff());
}

enum class Family { EAB, IEAB, AB, BDF, RK4 };

struct SchemeSpec {
  Family family;
  int order;
};

// Validates the (family, order) combination. EAB and AB cover orders 1..4,
// IEAB and BDF 2..4, RK4 is fixed at 4.
inline SchemeSpec make_scheme(Family family, int order) {
  const bool ok = (family == Family::EAB && order >= 1 && order <= 4) ||
                  (family == Family::AB && order >= 1 && order <= 4) ||
                  (family == Family::IEAB && order >= 2 && order <= 4) ||
                  (family == Family::BDF && order >= 2 && order <= 4) ||
                  (family == Family::RK4 && order == 4);
  if (!ok) throw std::invalid_argument("make_scheme: unsupported family/order");
  return SchemeSpec{family, order};
}

// Number of history samples the scheme consumes per step.
inline int history_depth(const SchemeSpec& s) {
  return s.family == Family::RK4 ? 1 : s.order;
}

inline std::string scheme_name(const SchemeSpec& s) {
  switch (s.family) {
    case Family::EAB: return "eab" + std::to_string(s.order);
    case Family::IEAB: return "ieab" + std::to_string(s.order);
    case Family::AB: return "ab" + std::to_string(s.order);
    case Family::BDF: return "bdf" + std::to_string(s.order);
    case Family::RK4: return "rk4";
  }
  return "?";
}

// "eab3", "ieab2", "ab4", "bdf2", "rk4" -> SchemeSpec
inline SchemeSpec parse_scheme(const std::string& text) {
  auto tail_order = [&](size_t prefix_len) {
    if (text.size() != prefix_len + 1 || !std::isdigit(text[prefix_len]))
      throw std::invalid_argument("parse_scheme: bad scheme '" + text + "'");
    return text[prefix_len] - '0';
  };
  if (text == "rk4") return make_scheme(Family::RK4, 4);
  if (text.rfind("ieab", 0) == 0) return make_scheme(Family::IEAB, tail_order(4));
  if (text.rfind("eab", 0) == 0) return make_scheme(Family::EAB, tail_order(3));
  if (text.rfind("ab", 0) == 0) return make_scheme(Family::AB, tail_order(2));
  if (text.rfind("bdf", 0) == 0) return make_scheme(Family::BDF, tail_order(3));
  throw std::invalid_argument("parse_scheme: bad scheme '" + text + "'");
}

// Sliding window of the most recent (t, y, a, b) samples, newest last.
// Times must be strictly increasing and uniformly spaced; the spacing check
// tolerates the rounding of t_n = n*h accumulated over long runs, so the
// tolerance scales with max(h, |t|).
class HistoryWindow {
 public:
  struct Sample {
    double t;
    StateVector y;
    DiagStabilizer a;
    StateVector b;
  };

  explicit HistoryWindow(int capacity) : capacity_(capacity) {
    if (capacity < 1 || capacity > 4)
      throw std::invalid_argument("HistoryWindow: capacity must be 1..4");
  }

  void push(double t, StateVector y, DiagStabilizer a, StateVector b) {
    if (!samples_.empty()) {
      const double prev = samples_.back().t;
      if (t <= prev) throw std::invalid_argument("HistoryWindow: times must increase");
      if (samples_.size() >= 2) {
        const double spacing_tol = 1e-12 * std::max({1.0, std::abs(t), step_});
        if (std::abs((t - prev) - step_) > spacing_tol)
          throw std::invalid_argument("HistoryWindow: non-uniform spacing");
      } else {
        step_ = t - prev;
      }
    }
    samples_.push_back(Sample{t, std::move(y), std::move(a), std::move(b)});
    if (static_cast<int>(samples_.size()) > capacity_) samples_.erase(samples_.begin());
  }

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(samples_.size()); }
  bool full() const { return size() == capacity_; }

  double step() const {
    if (samples_.size() < 2) throw std::logic_error("HistoryWindow: step needs 2 samples");
    return step_;
  }

  // back = 0 is the newest sample, back = 1 the one before it, and so on.
  const Sample& newest(int back = 0) const {
    if (back < 0 || back >= size())
      throw std::out_of_range("HistoryWindow: bad lookback index");
    return samples_[samples_.size() - 1 - static_cast<size_t>(back)];
  }

  void reset() {
    samples_.clear();
    step_ = 0.0;
  }

 private:
  int capacity_;
  double step_ = 0.0;
  std::vector<Sample> samples_;
};

}  // namespace exab
