#include "exab/models.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace exab {

SplitSystem make_dahlquist(double lambda, double theta) {
  if (!(theta > 0.0)) {
    throw std::invalid_argument("make_dahlquist: theta must be positive");
  }
  SplitSystem sys;
  sys.dim = 1;
  sys.eval_a = [lambda, theta](double, const StateVector&, DiagStabilizer& a) {
    a = DiagStabilizer::Constant(1, theta * lambda);
  };
  sys.eval_b = [lambda, theta](double, const StateVector& y, StateVector& b) {
    b = StateVector::Constant(1, (1.0 - theta) * lambda * y[0]);
  };
  sys.eval_f_independent = [lambda](double, const StateVector& y) {
    return StateVector::Constant(1, lambda * y[0]);
  };
  return sys;
}

double theta_from_r(double r) {
  if (r == -1.0) {
    throw std::invalid_argument("theta_from_r: r = -1 has no finite theta");
  }
  return r / (1.0 + r);
}

std::optional<double> r_from_theta(double theta) {
  if (theta == 1.0) return std::nullopt;  // exact split, infinite r
  return theta / (1.0 - theta);
}

std::function<double(double)> periodic_pulse(double amplitude, double start,
                                             double duration, double period) {
  if (!(period > 0.0) || !(duration >= 0.0)) {
    throw std::invalid_argument("periodic_pulse: need period > 0, duration >= 0");
  }
  return [=](double t) {
    if (t < start) return 0.0;
    double phase = std::fmod(t - start, period);
    return phase < duration ? amplitude : 0.0;
  };
}

std::function<double(double)> no_stimulus() {
  return [](double) { return 0.0; };
}

SplitSystem membrane_to_split(const MembraneModel& model) {
  if (model.gate_count < 1 || model.aux_count < 0 || !model.gate_kinetics ||
      !model.ionic_current || !model.stimulus ||
      (model.aux_count > 0 && !model.aux_rhs)) {
    throw std::invalid_argument("membrane_to_split: incomplete model");
  }
  const int p = model.gate_count;
  const int q = model.aux_count;
  const int n = model.dim();

  SplitSystem sys;
  sys.dim = n;
  sys.eval_a = [model, p, n](double, const StateVector& y, DiagStabilizer& a) {
    Eigen::VectorXd tau, w_inf;
    model.gate_kinetics(y[n - 1], tau, w_inf);
    a = DiagStabilizer::Zero(n);
    a.head(p) = -tau.cwiseInverse();
  };
  sys.eval_b = [model, p, q, n](double t, const StateVector& y, StateVector& b) {
    const double v = y[n - 1];
    Eigen::VectorXd tau, w_inf;
    model.gate_kinetics(v, tau, w_inf);
    b.resize(n);
    b.head(p) = w_inf.cwiseQuotient(tau);
    if (q > 0) b.segment(p, q) = model.aux_rhs(y.head(p), y.segment(p, q), v);
    b[n - 1] = -model.ionic_current(y.head(p), y.segment(p, q), v) +
               model.stimulus(t);
  };
  // Gate rows as (w_inf - w)/tau: algebraically a.*y + b, but computed in a
  // different association, so consistency_check exercises the wiring.
  sys.eval_f_independent = [model, p, q, n](double t, const StateVector& y) {
    const double v = y[n - 1];
    Eigen::VectorXd tau, w_inf;
    model.gate_kinetics(v, tau, w_inf);
    StateVector f(n);
    f.head(p) = (w_inf - y.head(p)).cwiseQuotient(tau);
    if (q > 0) f.segment(p, q) = model.aux_rhs(y.head(p), y.segment(p, q), v);
    f[n - 1] = -model.ionic_current(y.head(p), y.segment(p, q), v) +
               model.stimulus(t);
    return f;
  };
  return sys;
}

std::vector<SmoothPiece> pulse_windows(const MembraneModel& model,
                                       const StimulusProtocol& stim, double T) {
  if (!(T > 0.0)) {
    throw std::invalid_argument("pulse_windows: T must be positive");
  }
  if (!(stim.period > 0.0) || stim.duration < 0.0 ||
      stim.duration > stim.period) {
    throw std::invalid_argument("pulse_windows: need 0 <= duration <= period");
  }
  auto constant_level = [&model](double level) {
    MembraneModel piece = model;
    piece.stimulus = [level](double) { return level; };
    return membrane_to_split(piece);
  };
  // (level, t_end) spans; equal-level neighbors merge so no window edge sits
  // where the rhs does not actually switch.
  std::vector<std::pair<double, double>> spans;
  auto extend_to = [&](double level, double t_end) {
    t_end = std::min(t_end, T);
    const double t_begin = spans.empty() ? 0.0 : spans.back().second;
    if (t_end <= t_begin) return;
    if (!spans.empty() && spans.back().first == level)
      spans.back().second = t_end;
    else
      spans.emplace_back(level, t_end);
  };
  // Pulses fully before t = 0 contribute no window; start the scan at the
  // first one that can reach past 0.
  const long n0 =
      stim.start < 0.0
          ? static_cast<long>(std::floor(-stim.start / stim.period))
          : 0;
  for (long n = n0;; ++n) {
    const double on = stim.start + static_cast<double>(n) * stim.period;
    if (on >= T) break;
    extend_to(0.0, on);
    extend_to(stim.amplitude, on + stim.duration);
  }
  extend_to(0.0, T);

  std::vector<SmoothPiece> out;
  out.reserve(spans.size());
  for (const auto& [level, t_end] : spans)
    out.push_back({constant_level(level), t_end});
  return out;
}

namespace {

// (c1*exp(c2*(v+c3)) + c4*(v+c5)) / (exp(c6*(v+c3)) + c7)
struct RateCoeffs {
  double c1, c2, c3, c4, c5, c6, c7;
};

double eval_rate(const RateCoeffs& r, double v) {
  const double num = r.c1 * std::exp(r.c2 * (v + r.c3)) + r.c4 * (v + r.c5);
  const double den = std::exp(r.c6 * (v + r.c3)) + r.c7;
  if (den == 0.0 && num == 0.0) {
    // Removable singularity (only the m-gate alpha hits it, at v = -47):
    // resolve by the derivative ratio.
    return (r.c1 * r.c2 * std::exp(r.c2 * (v + r.c3)) + r.c4) /
           (r.c6 * std::exp(r.c6 * (v + r.c3)));
  }
  return num / den;
}

constexpr int kBrGates = 6;
const char* const kBrGateNames[kBrGates] = {"m", "h", "j", "d", "f", "x1"};

struct BrParams {
  std::array<RateCoeffs, kBrGates> alpha, beta;
  double g_na, g_nac, e_na, g_s, es_const, es_ln_coeff, ik1_scale, ix1_scale;
  double cai_influx_scale, cai_relax_rate, cai_rest_level;
  StimulusProtocol stim;
  Eigen::VectorXd init;
};

std::map<std::string, double> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open parameter file: " + path);
  }
  std::map<std::string, double> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key, eq, value, extra;
    if (!(ls >> key)) continue;  // blank or comment-only
    if (!(ls >> eq >> value) || eq != "=" || (ls >> extra)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    }
    std::size_t used = 0;
    double parsed = 0.0;
    try {
      parsed = std::stod(value, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != value.size() || !std::isfinite(parsed)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": bad numeric value '" + value + "'");
    }
    if (!kv.emplace(key, parsed).second) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

BrParams load_br_params(const std::string& path) {
  auto kv = read_key_value_file(path);
  auto take = [&kv, &path](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw std::runtime_error(path + ": missing key '" + key + "'");
    }
    const double v = it->second;
    kv.erase(it);
    return v;
  };

  BrParams p;
  for (int g = 0; g < kBrGates; ++g) {
    const std::string base = std::string("rate_") + kBrGateNames[g];
    auto read_rate = [&take, &base](const char* side) {
      const std::string stem = base + "_" + side + "_c";
      return RateCoeffs{take(stem + "1"), take(stem + "2"), take(stem + "3"),
                        take(stem + "4"), take(stem + "5"), take(stem + "6"),
                        take(stem + "7")};
    };
    p.alpha[g] = read_rate("alpha");
    p.beta[g] = read_rate("beta");
  }
  p.g_na = take("g_na");
  p.g_nac = take("g_nac");
  p.e_na = take("e_na");
  p.g_s = take("g_s");
  p.es_const = take("es_const");
  p.es_ln_coeff = take("es_ln_coeff");
  p.ik1_scale = take("ik1_scale");
  p.ix1_scale = take("ix1_scale");
  p.cai_influx_scale = take("cai_influx_scale");
  p.cai_relax_rate = take("cai_relax_rate");
  p.cai_rest_level = take("cai_rest_level");
  p.stim = {take("stim_amplitude"), take("stim_start"), take("stim_duration"),
            take("stim_period")};
  p.init.resize(kBrGates + 2);
  for (int g = 0; g < kBrGates; ++g) {
    p.init[g] = take(std::string("init_") + kBrGateNames[g]);
  }
  p.init[kBrGates] = take("init_cai");
  p.init[kBrGates + 1] = take("init_v");

  if (!kv.empty()) {
    throw std::runtime_error(path + ": unknown key '" + kv.begin()->first +
                             "'");
  }
  return p;
}

double br_ionic_current(const BrParams& p, const Eigen::VectorXd& w,
                        const Eigen::VectorXd& c, double v) {
  const double m = w[0], h = w[1], j = w[2], d = w[3], f = w[4], x1 = w[5];
  const double cai = c[0];
  const double i_na = (p.g_na * m * m * m * h * j + p.g_nac) * (v - p.e_na);
  const double e_s = p.es_const + p.es_ln_coeff * std::log(cai);
  const double i_s = p.g_s * d * f * (v - e_s);
  const double k1_den = 1.0 - std::exp(-0.04 * (v + 23.0));
  // 0/0 at v = -23 exactly; the limit of the quotient is 0.2/0.04.
  const double k1_lin = k1_den == 0.0 ? 5.0 : 0.2 * (v + 23.0) / k1_den;
  const double i_k1 =
      p.ik1_scale * (4.0 * (std::exp(0.04 * (v + 85.0)) - 1.0) /
                         (std::exp(0.08 * (v + 53.0)) +
                          std::exp(0.04 * (v + 53.0))) +
                     k1_lin);
  const double i_x1 = x1 * p.ix1_scale * (std::exp(0.04 * (v + 77.0)) - 1.0) /
                      std::exp(0.04 * (v + 35.0));
  return i_na + i_s + i_k1 + i_x1;
}

double br_slow_inward(const BrParams& p, const Eigen::VectorXd& w, double cai,
                      double v) {
  const double e_s = p.es_const + p.es_ln_coeff * std::log(cai);
  return p.g_s * w[3] * w[4] * (v - e_s);
}

MembraneModel build_beeler_reuter(const BrParams& p) {
  MembraneModel model;
  model.gate_count = kBrGates;
  model.aux_count = 1;
  model.gate_kinetics = [p](double v, Eigen::VectorXd& tau,
                            Eigen::VectorXd& w_inf) {
    tau.resize(kBrGates);
    w_inf.resize(kBrGates);
    for (int g = 0; g < kBrGates; ++g) {
      const double al = eval_rate(p.alpha[g], v);
      const double be = eval_rate(p.beta[g], v);
      tau[g] = 1.0 / (al + be);
      w_inf[g] = al / (al + be);
    }
  };
  model.aux_rhs = [p](const Eigen::VectorXd& w, const Eigen::VectorXd& c,
                      double v) {
    const double i_s = br_slow_inward(p, w, c[0], v);
    return Eigen::VectorXd::Constant(
        1, -p.cai_influx_scale * i_s +
               p.cai_relax_rate * (p.cai_rest_level - c[0]));
  };
  model.ionic_current = [p](const Eigen::VectorXd& w, const Eigen::VectorXd& c,
                            double v) { return br_ionic_current(p, w, c, v); };
  model.stimulus = periodic_pulse(p.stim.amplitude, p.stim.start,
                                  p.stim.duration, p.stim.period);
  model.initial_state = p.init;
  return model;
}

}  // namespace

std::string beeler_reuter_params_path() {
  if (const char* dir = std::getenv("EXAB_DATA_DIR")) {
    return std::string(dir) + "/beeler_reuter.params";
  }
  return std::string(EXAB_SOURCE_DATA_DIR) + "/beeler_reuter.params";
}

MembraneModel beeler_reuter(const std::string& params_path) {
  return build_beeler_reuter(load_br_params(params_path));
}

MembraneModel beeler_reuter() {
  return beeler_reuter(beeler_reuter_params_path());
}

StimulusProtocol beeler_reuter_stimulus(const std::string& params_path) {
  return load_br_params(params_path).stim;
}

StimulusProtocol beeler_reuter_stimulus() {
  return beeler_reuter_stimulus(beeler_reuter_params_path());
}

}  // namespace exab
