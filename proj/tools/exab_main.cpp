// Command-line driver for the experiment suite. Subcommands:
//   converge        error-vs-step study against an RK4 reference
//   dt0             largest stable step per scheme, by bracket growth + bisection
//   stability-grid  rho over a rectangle of lambda*h values (CSV)
//   a0-threshold    theta range giving stability on the negative real axis
//   positivity      step-size and startup admissibility check, orders 2 and 3
//   tables          error table at one step plus optional dt0 table
// Configuration comes from an INI file (--config) with sections [model],
// [scheme], [grid], [run]; a few common values have direct flags that
// override the file. Exit codes: 0 ok, 2 bad config, 3 bracket/solver error.
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "../vendor/CLI11.hpp"
#include "exab/config.hpp"
#include "exab/csv.hpp"
#include "exab/harness.hpp"
#include "exab/models.hpp"
#include "exab/stability.hpp"
#include "exab/types.hpp"

namespace {

using namespace exab;

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"model", {"name", "lambda", "theta", "params", "stim", "v0"}},
    {"scheme", {"list", "k"}},
    {"grid",
     {"k", "theta", "re_min", "re_max", "im_min", "im_max", "dx", "z_min",
      "theta_lo", "theta_hi", "tol"}},
    {"run",
     {"t_end", "h", "h_list", "h_ref", "h_seed", "h_cap", "tol", "threads",
      "overflow_cap", "with_dt0", "a", "y_start", "b_start", "k1", "k2"}},
};

struct ModelSetup {
  SplitSystem sys;
  StateVector y0;
  // Set for the pulsed membrane model; convergence runs then restart at the
  // pulse edges instead of stepping interpolants across them.
  std::optional<MembraneModel> model;
  std::optional<StimulusProtocol> pulse;

  std::vector<SmoothPiece> pieces(double T) const {
    if (model && pulse) return pulse_windows(*model, *pulse, T);
    return {{sys, T}};
  }
};

ModelSetup build_model(const Config& cfg) {
  const std::string name = cfg.get_string("model", "name", "br");
  ModelSetup setup;
  if (name == "dahlquist") {
    const double lambda = cfg.get_double("model", "lambda", -82.0);
    const double theta = cfg.get_double("model", "theta", 1.0);
    setup.sys = make_dahlquist(lambda, theta);
    setup.y0 = StateVector::Constant(1, 1.0);
  } else if (name == "br") {
    MembraneModel model = cfg.has("model", "params")
                              ? beeler_reuter(cfg.get_string("model", "params"))
                              : beeler_reuter();
    const std::string stim = cfg.get_string("model", "stim", "default");
    if (stim == "none") {
      model.stimulus = no_stimulus();
    } else if (stim == "default") {
      setup.pulse = cfg.has("model", "params")
                        ? beeler_reuter_stimulus(cfg.get_string("model", "params"))
                        : beeler_reuter_stimulus();
    } else {
      throw ConfigError("[model] stim must be 'default' or 'none'");
    }
    setup.y0 = model.initial_state;
    setup.sys = membrane_to_split(model);
    setup.model = std::move(model);
  } else {
    throw ConfigError("[model] name must be 'br' or 'dahlquist'");
  }
  if (cfg.has("model", "v0"))
    setup.y0[setup.y0.size() - 1] = cfg.get_double("model", "v0");
  return setup;
}

std::vector<SchemeSpec> scheme_list(const Config& cfg,
                                    const std::string& fallback) {
  std::vector<SchemeSpec> out;
  for (const auto& name :
       Config::parse_string("[scheme]\nlist = " +
                            cfg.get_string("scheme", "list", fallback))
           .get_string_list("scheme", "list")) {
    out.push_back(parse_scheme(name));
  }
  return out;
}

IntegrateOptions integrate_options(const Config& cfg) {
  IntegrateOptions opts;
  opts.overflow_cap = cfg.get_double("run", "overflow_cap", 1e10);
  return opts;
}

std::string join_path(const std::string& dir, const std::string& file) {
  if (dir.empty() || dir == ".") return file;
  return dir.back() == '/' ? dir + file : dir + "/" + file;
}

int cmd_converge(const Config& cfg, const std::string& out_dir) {
  const auto setup = build_model(cfg);
  const auto schemes = scheme_list(cfg, "eab2,eab3,eab4,ieab2,ieab3,ieab4");
  const double T = cfg.get_double("run", "t_end", 500.0);
  std::vector<double> h_list{8e-3, 4e-3, 2e-3, 1e-3};
  if (cfg.has("run", "h_list")) h_list = cfg.get_double_list("run", "h_list");
  double h_min = h_list.front();
  for (double h : h_list) h_min = std::min(h_min, h);
  const double h_ref = cfg.get_double("run", "h_ref", h_min / 16.0);

  const auto reports = convergence_study(schemes, setup.pieces(T), setup.y0,
                                         h_list, h_ref, integrate_options(cfg));
  CsvWriter csv(join_path(out_dir, "convergence.csv"),
                {"scheme", "k", "h", "e_h", "order"});
  for (const auto& r : reports) {
    csv.row({scheme_name(r.scheme), std::to_string(r.scheme.order),
             format_g15(r.h), format_g15(r.e_h),
             r.estimated_order ? format_g15(*r.estimated_order) : ""});
  }
  csv.close();
  return 0;
}

// Grows a success/failure bracket around h_seed, then bisects. Failing at the
// smallest probed step or succeeding at the cap is reported as a bracket
// error (exit 3).
int cmd_dt0(const Config& cfg, const std::string& out_dir) {
  const auto setup = build_model(cfg);
  const auto schemes = scheme_list(cfg, "eab2,ab2,bdf2");
  const double T = cfg.get_double("run", "t_end", 1000.0);
  const double tol = cfg.get_double("run", "tol", 1e-4);
  const double h_cap = cfg.get_double("run", "h_cap", 4.0);
  const double h_floor = 1e-8;
  const auto opts = integrate_options(cfg);

  CsvWriter csv(join_path(out_dir, "dt0.csv"),
                {"scheme", "k", "dt0", "h_ok", "h_fail"});
  for (const auto& scheme : schemes) {
    auto fails = [&](double h) {
      return integrate(scheme, setup.sys, setup.y0, h, T, opts).failed();
    };
    double h_ok = cfg.get_double("run", "h_seed", 1e-3);
    while (fails(h_ok)) {
      h_ok *= 0.5;
      if (h_ok < h_floor)
        throw BracketError(BracketError::Side::kLowFails,
                           scheme_name(scheme) + ": fails at every probed step");
    }
    double h_fail = h_ok * 2.0;
    while (!fails(h_fail)) {
      h_ok = h_fail;
      h_fail *= 2.0;
      if (h_fail > h_cap)
        throw BracketError(BracketError::Side::kHighSucceeds,
                           scheme_name(scheme) + ": no failure below the step cap");
    }
    const double dt0 = critical_time_step(scheme, setup.sys, setup.y0, T, h_ok,
                                          h_fail, tol, opts);
    csv.row({scheme_name(scheme), std::to_string(scheme.order), format_g15(dt0),
             format_g15(h_ok), format_g15(h_fail)});
    std::printf("%s dt0 = %s\n", scheme_name(scheme).c_str(),
                format_g15(dt0).c_str());
  }
  csv.close();
  return 0;
}

int cmd_stability_grid(const Config& cfg, const std::string& out_dir, int k,
                       double theta) {
  if (k == 0) k = cfg.get_int("grid", "k");
  if (theta == 0.0) theta = cfg.get_double("grid", "theta");
  Grid2D grid;
  grid.re_min = cfg.get_double("grid", "re_min", grid.re_min);
  grid.re_max = cfg.get_double("grid", "re_max", grid.re_max);
  grid.im_min = cfg.get_double("grid", "im_min", grid.im_min);
  grid.im_max = cfg.get_double("grid", "im_max", grid.im_max);
  grid.dx = cfg.get_double("grid", "dx", grid.dx);
  const int threads = cfg.get_int("run", "threads", 0);

  const StabilityGrid result = stability_grid(k, theta, grid, threads);
  CsvWriter csv(join_path(out_dir, "stability_grid.csv"),
                {"re_z", "im_z", "rho"});
  for (int iy = 0; iy < result.ny; ++iy) {
    const double im = grid.im_min + iy * grid.dx;
    for (int ix = 0; ix < result.nx; ++ix) {
      const double re = grid.re_min + ix * grid.dx;
      csv.row_values({re, im, result.rho(iy, ix)});
    }
  }
  csv.close();
  return 0;
}

int cmd_a0_threshold(const Config& cfg, const std::string& out_dir, int k) {
  if (k == 0) k = cfg.get_int("grid", "k");
  Grid1D grid;
  grid.z_min = cfg.get_double("grid", "z_min", grid.z_min);
  grid.dx = cfg.get_double("grid", "dx", grid.dx);
  const double default_hi = k == 3 ? 2.5 : 1.6;
  const double lo = cfg.get_double("grid", "theta_lo", 0.5);
  const double hi = cfg.get_double("grid", "theta_hi", default_hi);
  const double tol = cfg.get_double("grid", "tol", 1e-3);

  const ThetaThresholds th = find_theta_thresholds(k, lo, hi, tol, grid);
  CsvWriter csv(join_path(out_dir, "a0_thresholds.csv"),
                {"k", "side", "theta_unstable", "theta_stable"});
  csv.row({std::to_string(k), "lower", format_g15(th.lower.unstable),
           format_g15(th.lower.stable)});
  std::printf("k=%d lower threshold bracket: unstable %s, stable %s\n", k,
              format_g15(th.lower.unstable).c_str(),
              format_g15(th.lower.stable).c_str());
  if (th.upper) {
    csv.row({std::to_string(k), "upper", format_g15(th.upper->unstable),
             format_g15(th.upper->stable)});
    std::printf("k=%d upper threshold bracket: stable %s, unstable %s\n", k,
                format_g15(th.upper->stable).c_str(),
                format_g15(th.upper->unstable).c_str());
  } else {
    std::printf("k=%d stable through theta_hi = %s\n", k, format_g15(hi).c_str());
  }
  csv.close();
  return 0;
}

int cmd_positivity(const Config& cfg) {
  const int k = cfg.get_int("scheme", "k", 2);
  const double h = cfg.get_double("run", "h", 0.5);
  const double a = cfg.get_double("run", "a", -1.0);
  const double y_start = cfg.get_double("run", "y_start", 0.5);
  const double b_start = cfg.get_double("run", "b_start", 0.25);
  const double K1 = cfg.get_double("run", "k1", 0.0);
  const double K2 = cfg.get_double("run", "k2", 1.0);

  bool ok = false;
  double cp = 0.0;
  if (k == 2) {
    cp = eab2_positivity_cp(h, a);
    ok = positivity_check_eab2(h, a, y_start, b_start, K1, K2);
  } else if (k == 3) {
    cp = eab3_positivity_cp(h, a);
    ok = positivity_check_eab3(h, a, y_start, b_start, K1, K2);
  } else {
    throw ConfigError("positivity: [scheme] k must be 2 or 3");
  }
  std::printf("order %d, h = %s, a = %s: C_p = %s, admissible = %s\n", k,
              format_g15(h).c_str(), format_g15(a).c_str(),
              format_g15(cp).c_str(), ok ? "yes" : "no");
  if (k == 3)
    std::printf("step bound beta3/|a| with beta3 = %s\n",
                format_g15(beta3()).c_str());
  return 0;
}

int cmd_tables(const Config& cfg, const std::string& out_dir) {
  const auto setup = build_model(cfg);
  const auto schemes =
      scheme_list(cfg, "ab2,ab3,ab4,eab2,eab3,eab4,ieab2,ieab3,ieab4");
  const double T = cfg.get_double("run", "t_end", 500.0);
  const double h = cfg.get_double("run", "h", 1e-3);
  const double h_ref = cfg.get_double("run", "h_ref", h / 16.0);
  const auto opts = integrate_options(cfg);

  const auto reports =
      convergence_study(schemes, setup.pieces(T), setup.y0, {h}, h_ref, opts);
  CsvWriter csv(join_path(out_dir, "error_table.csv"),
                {"scheme", "k", "h", "e_h"});
  for (const auto& r : reports) {
    csv.row({scheme_name(r.scheme), std::to_string(r.scheme.order),
             format_g15(r.h), format_g15(r.e_h)});
  }
  csv.close();
  if (cfg.get_int("run", "with_dt0", 0)) return cmd_dt0(cfg, out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilized exponential multistep experiment driver"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  int k = 0;
  double theta = 0.0;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--out", out_dir, "output directory for CSV files");

  auto* converge = app.add_subcommand("converge", "error vs step study");
  auto* dt0 = app.add_subcommand("dt0", "largest stable step per scheme");
  auto* sgrid = app.add_subcommand("stability-grid", "rho over a z rectangle");
  sgrid->add_option("--k", k, "scheme order 2..4");
  sgrid->add_option("--theta", theta, "splitting parameter");
  auto* a0 = app.add_subcommand("a0-threshold", "theta stability thresholds");
  a0->add_option("--k", k, "scheme order 2..4");
  auto* positivity =
      app.add_subcommand("positivity", "bounds-preservation check");
  auto* tables = app.add_subcommand("tables", "error and dt0 tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits 0, parse errors are config errors
  }

  try {
    const Config cfg = config_path.empty() ? Config::parse_string("")
                                           : Config::parse_file(config_path);
    cfg.check_known(kKnownKeys);
    if (converge->parsed()) return cmd_converge(cfg, out_dir);
    if (dt0->parsed()) return cmd_dt0(cfg, out_dir);
    if (sgrid->parsed()) return cmd_stability_grid(cfg, out_dir, k, theta);
    if (a0->parsed()) return cmd_a0_threshold(cfg, out_dir, k);
    if (positivity->parsed()) return cmd_positivity(cfg);
    if (tables->parsed()) return cmd_tables(cfg, out_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
