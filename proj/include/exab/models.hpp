#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "exab/types.hpp"

namespace exab {

// Scalar linear test problem y' = lambda*y with the splitting a = theta*lambda,
// b(y) = (1 - theta)*lambda*y.  theta controls how much of the rate is frozen
// into the exponential part; theta = 1 reproduces the exact propagator.
struct DahlquistSplit {
  double lambda = -1.0;
  double theta = 1.0;  // > 0
};

// Builds the 1-dimensional SplitSystem for DahlquistSplit.  Throws
// std::invalid_argument unless theta > 0.
SplitSystem make_dahlquist(double lambda, double theta);

// Reparameterization r = theta / (1 - theta), i.e. theta = r / (1 + r).
// theta_from_r throws std::invalid_argument at r = -1 (no finite theta).
// r_from_theta returns nullopt at theta = 1, where the split is exact and r
// has no finite value.
double theta_from_r(double r);
std::optional<double> r_from_theta(double theta);

// Membrane equation in gating form.  State layout: p gating variables w,
// then q auxiliary variables c, then the transmembrane potential v (last).
// Gate i relaxes toward w_inf_i(v) with time constant tau_i(v); auxiliary
// variables follow aux_rhs; v' = -I_ion + I_st.
struct MembraneModel {
  int gate_count = 0;  // p
  int aux_count = 0;   // q

  // Fills tau and w_inf (each resized to gate_count) at potential v.
  // Required: tau > 0 and 0 <= w_inf <= 1 for v in [-100, 60] mV.
  std::function<void(double v, Eigen::VectorXd& tau, Eigen::VectorXd& w_inf)>
      gate_kinetics;

  // Right-hand side of the auxiliary block (length aux_count).
  std::function<Eigen::VectorXd(const Eigen::VectorXd& w,
                                const Eigen::VectorXd& c, double v)>
      aux_rhs;

  // Total ionic current entering v' = -I_ion + I_st.
  std::function<double(const Eigen::VectorXd& w, const Eigen::VectorXd& c,
                       double v)>
      ionic_current;

  // Stimulus current I_st(t); may be a zero function.
  std::function<double(double t)> stimulus;

  Eigen::VectorXd initial_state;  // layout (w, c, v)

  int dim() const { return gate_count + aux_count + 1; }
};

// Periodic rectangular current pulse: amplitude on [start + n*period,
// start + n*period + duration), n = 0, 1, ..., zero elsewhere.
std::function<double(double)> periodic_pulse(double amplitude, double start,
                                             double duration, double period);

// Zero stimulus.
std::function<double(double)> no_stimulus();

// Wires a MembraneModel into the solver splitting: the stabilizer carries
// -1/tau_i on the gate rows and 0 on auxiliary and v rows, so
// b = (w_inf/tau, aux_rhs, -I_ion + I_st).  The independent full evaluator
// computes the gate rows as (w_inf - w)/tau, which must agree with a.*y + b
// up to roundoff.
SplitSystem membrane_to_split(const MembraneModel& model);

// Beeler-Reuter ventricular cell model: 6 gates (m, h, j, d, f, x1), one
// calcium concentration, potential last; dimension 8.  Rate functions and
// current constants are read from the parameter file, which also carries the
// default stimulus protocol and the resting initial state.
//
// The file is located at <dir>/beeler_reuter.params where <dir> is the
// EXAB_DATA_DIR environment variable if set, else the build-time source data
// directory.  An explicit path overrides both.
MembraneModel beeler_reuter();
MembraneModel beeler_reuter(const std::string& params_path);

// Parameters of the loaded Beeler-Reuter instance that experiment drivers
// need beyond the SplitSystem: the default stimulus protocol.
struct StimulusProtocol {
  double amplitude = 0.0;
  double start = 0.0;
  double duration = 0.0;
  double period = 0.0;
};
StimulusProtocol beeler_reuter_stimulus();
StimulusProtocol beeler_reuter_stimulus(const std::string& params_path);

// Tiles [0, T] with constant-stimulus copies of the model, cut at the pulse
// edges.  A rectangular stimulus makes the rhs jump there; on each returned
// window it is smooth, so runs can restart their history at the edges instead
// of dragging interpolants across a jump.  Requires 0 <= duration <= period.
std::vector<SmoothPiece> pulse_windows(const MembraneModel& model,
                                       const StimulusProtocol& stim, double T);

// Resolved location of the parameter file (for diagnostics and tests).
std::string beeler_reuter_params_path();

}  // namespace exab
