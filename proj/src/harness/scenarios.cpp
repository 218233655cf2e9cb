#include "emtime/harness/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include "emtime/classical/clock.hpp"
#include "emtime/classical/emergence.hpp"
#include "emtime/classical/jacobi.hpp"
#include "emtime/core/channel_basis.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/fit.hpp"
#include "emtime/core/quadrature.hpp"
#include "emtime/dynamics/amplitudes.hpp"
#include "emtime/dynamics/emergence_scan.hpp"
#include "emtime/dynamics/tdse.hpp"
#include "emtime/semiclassics/quantum_time.hpp"

namespace emtime::harness {

bool StageLog::all_ok() const noexcept {
  return std::all_of(records_.begin(), records_.end(), [](const StageRecord& r) { return r.status == "ok"; });
}

namespace {

const Json& base_document() {
  static const Json base = Json::parse(R"({
    "seed": 1,
    "composite": {"M": 1.0, "m": 1.0, "hbar": 1.0, "E": null, "E_c": null,
                  "V_env": {"type": "constant", "value": 0.0},
                  "V_sys": {"type": "harmonic", "k": 1.0, "center": 0.0},
                  "V_int": {"type": "zero"}},
    "grid": {"x_min": -6.0, "x_max": 6.0, "nx": 41, "R_min": 0.0, "R_max": 20.0, "nR": 401},
    "solver": {"tol": 1e-10, "channels": 2, "candidates": 6, "order": "fourth", "taper": 0.15, "margin": 0.05,
               "points_per_wavelength": 16.0, "min_nR": 401, "max_iter": 200000},
    "dynamics": {"v": 1.0, "x0": 1.0, "p0": 0.0, "t_end": 10.0, "steps": 1000, "rabi_coupling": 0.2},
    "path": {"start": [0.0, 0.0], "end": [1.0, 1.0], "segments": 16, "delta": 1e-4},
    "scan": {"parameter": "", "values": []}
  })");
  return base;
}

const char* scenario_patch(const std::string& name) {
  if (name == "perfect-clock")
    return R"({"composite": {"M": 1.0, "E_c": 50.0},
               "grid": {"R_min": 1.0, "R_max": 3.0, "nR": 2001}})";
  if (name == "harmonic-clock-two-level")
    return R"({"composite": {"M": 100.0, "E_c": 12.5,
                             "V_env": {"type": "harmonic", "k": 1.0, "center": 0.0},
                             "V_sys": {"type": "double_well", "barrier": 4.0, "half_separation": 2.0,
                                       "min": -6.0, "max": 6.0, "n": 481},
                             "V_int": {"type": "windowed_pulse", "amplitude": 0.01, "R0": 0.0, "sigma": 1.0,
                                       "h": {"type": "linear", "slope": 1.0}}},
               "grid": {"x_min": -6.0, "x_max": 6.0, "nx": 241, "R_min": -4.0, "R_max": 4.0, "nR": 801},
               "solver": {"channels": 2},
               "dynamics": {"t_end": 20.0, "steps": 4000, "rabi_coupling": 0.2}})";
  if (name == "beam-on-atom")
    return R"({"composite": {"M": 2000.0, "E_c": 1000.0,
                             "V_int": {"type": "windowed_pulse", "amplitude": 0.05, "R0": 0.0, "sigma": 1.0,
                                       "h": {"type": "linear", "slope": 1.0}}},
               "grid": {"x_min": -8.0, "x_max": 8.0, "nx": 201, "R_min": -10.0, "R_max": 10.0, "nR": 2001},
               "solver": {"channels": 4},
               "dynamics": {"steps": 4000}})";
  if (name == "classical-emergence")
    return R"({"composite": {"V_int": {"type": "bilinear", "lambda": 0.05}},
               "grid": {"R_min": 0.0},
               "dynamics": {"v": 1.0, "x0": 1.0, "p0": 0.0, "t_end": 10.0, "steps": 10000},
               "scan": {"parameter": "M", "values": [10.0, 100.0, 1000.0, 10000.0]}})";
  if (name == "jacobi-paths")
    return R"({"composite": {"M": 1.0, "m": 1.0, "E": 1.0,
                             "V_env": {"type": "constant", "value": 0.0},
                             "V_sys": {"type": "constant", "value": 0.0}},
               "solver": {"tol": 1e-8},
               "path": {"start": [0.0, 0.0], "end": [1.0, 1.0], "segments": 16, "delta": 1e-4}})";
  if (name == "emergence-scan")
    return R"({"composite": {"V_sys": {"type": "harmonic", "k": 1.0, "center": 0.0},
                             "V_int": {"type": "windowed_pulse", "amplitude": 0.05, "R0": 10.0, "sigma": 2.0,
                                       "h": {"type": "linear", "slope": 1.0}}},
               "grid": {"x_min": -6.0, "x_max": 6.0, "nx": 41, "R_min": 0.0, "R_max": 20.0},
               "dynamics": {"v": 10.0},
               "scan": {"parameter": "M", "values": [0.3, 1.0, 3.0, 10.0]}})";
  throw ConfigError("/scenario", "unknown scenario \"" + name + "\"");
}

std::vector<std::string> complex_columns(const std::string& base) { return {"re_" + base, "im_" + base}; }

Table make_table(std::string name, std::vector<std::string> columns) { return Table{std::move(name), std::move(columns), {}}; }

void append(std::vector<std::string>& cols, const std::vector<std::string>& more) {
  cols.insert(cols.end(), more.begin(), more.end());
}

double matrix_element_x(const ComplexField1D& a, const ComplexField1D& b) {
  auto xb = b;
  for (std::size_t i = 0; i < xb.size(); ++i) xb[i] *= b.grid()[i];
  return inner_product(a, xb).real();
}

// ---------------------------------------------------------------------------

std::vector<Table> run_perfect_clock(const ScenarioConfig& c, StageLog& log) {
  const auto& cs = c.composite;
  const Grid1D Rg(c.grid.R_min, c.grid.R_max, c.grid.nR);
  const double P = std::sqrt(2.0 * cs.M * *cs.E_c);
  const auto clock = log.run("clock", [&] { return semiclassics::perfect_clock(cs.M, P, Rg, cs.hbar); });
  semiclassics::QuantumTimeOptions qo;
  qo.hbar = cs.hbar;
  const auto tau = log.run("quantum_time", [&] { return semiclassics::quantum_time(clock.chi, cs.M, qo); });

  // Real Gaussian χ = exp(−R²/2s²) gives τ = −i(Ms²/ħ) ln(R/R_min).
  const double s = 0.5 * c.grid.R_max;
  const double scale = cs.M * s * s / cs.hbar;
  const auto gauss = ComplexField1D::sample(Rg, [&](double R) { return std::exp(-R * R / (2.0 * s * s)); });
  const auto gtau = log.run("gaussian_time", [&] { return semiclassics::quantum_time(gauss, cs.M, qo); });

  auto cols = std::vector<std::string>{"R", "t_classical"};
  append(cols, complex_columns("tau"));
  append(cols, complex_columns("chi"));
  Table plane = make_table("perfect_clock", cols);
  Table gt = make_table("gaussian_clock", {"R", "re_tau", "im_tau", "im_tau_oracle"});
  double worst_plane = 0.0, t_max = 0.0, worst_gauss = 0.0;
  for (std::size_t i = 0; i < Rg.size(); ++i) {
    const double t = cs.M * (Rg[i] - Rg.min()) / P;
    t_max = std::max(t_max, t);
    worst_plane = std::max(worst_plane, std::abs(tau.tau[i] - cplx(t, 0.0)));
    plane.add_row({Rg[i], t, tau.tau[i].real(), tau.tau[i].imag(), clock.chi[i].real(), clock.chi[i].imag()});
    const double oracle = -scale * std::log(Rg[i] / Rg.min());
    worst_gauss = std::max(worst_gauss, std::abs(gtau.tau[i] / scale - cplx(0.0, oracle / scale)));
    gt.add_row({Rg[i], gtau.tau[i].real(), gtau.tau[i].imag(), oracle});
  }
  Table summary = make_table("summary", {"v", "plane_wave_max_rel_error", "plane_wave_imaginary_fraction",
                                         "gaussian_max_error", "gaussian_scale"});
  summary.add_row({clock.v, worst_plane / t_max, tau.imaginary_fraction(), worst_gauss, scale});
  return {plane, gt, summary};
}

// ---------------------------------------------------------------------------

std::vector<Table> run_harmonic_clock_two_level(const ScenarioConfig& c, StageLog& log) {
  const auto& cs = c.composite;
  const Grid1D xg(c.grid.x_min, c.grid.x_max, c.grid.nx);
  const Grid1D Rg(c.grid.R_min, c.grid.R_max, c.grid.nR);
  const dynamics::SystemPart sys{cs.V_sys, cs.m, cs.hbar, xg};
  // Second-order states share the grid propagator's discretization.
  const auto basis = log.run("system_basis", [&] {
    return system_eigenstates(cs.V_sys, cs.m, cs.hbar, xg, c.solver.channels, StencilOrder::second);
  });
  const auto tmap = log.run("clock", [&] {
    return classical::clock_time_map(classical::ClockModel{cs.V_env, cs.M, *cs.E_c, Rg});
  });
  const double T = tmap.t().back();
  const auto& V_int = cs.V_int;
  const dynamics::Interaction V_I = [&](double x, double t) { return eval(V_int, x, tmap.R_at(t)); };
  dynamics::AmplitudeOptions ao;
  ao.hbar = cs.hbar;
  const auto cmp = log.run("two_route", [&] {
    return dynamics::compare_amplitudes_vs_grid(sys, basis, V_I, basis.state(0),
                                                dynamics::uniform_times(0.0, T, c.dynamics.steps), ao);
  });

  // Degenerate limit: the tunnelling doublet with its splitting removed and a constant coupling V.
  const double e_mean = 0.5 * (basis.energies()[0] + basis.energies()[1]);
  const ChannelBasis pair(xg, {basis.state(0), basis.state(1)}, {e_mean, e_mean});
  const double x01 = matrix_element_x(basis.state(0), basis.state(1));
  const double V = c.dynamics.rabi_coupling;
  const dynamics::Interaction V_rabi = [&](double x, double) { return V * x / x01; };
  const auto rabi = log.run("rabi", [&] {
    return dynamics::propagate_amplitudes(pair, V_rabi, {1.0, 0.0},
                                          dynamics::uniform_times(0.0, c.dynamics.t_end, c.dynamics.steps), ao);
  });

  std::vector<std::string> cols{"t", "R", "deviation"};
  for (std::size_t m = 0; m < basis.size(); ++m) append(cols, complex_columns("a" + std::to_string(m)));
  for (std::size_t m = 0; m < basis.size(); ++m) append(cols, complex_columns("grid_a" + std::to_string(m)));
  Table route = make_table("two_route", cols);
  for (std::size_t k = 0; k < cmp.amplitudes.t.size(); ++k) {
    const double t = cmp.amplitudes.t[k];
    std::vector<double> row{t, tmap.R_at(t), cmp.deviation[k]};
    for (const auto& a : cmp.amplitudes.a[k]) {
      row.push_back(a.real());
      row.push_back(a.imag());
    }
    for (std::size_t m = 0; m < basis.size(); ++m) {
      const cplx g = std::polar(1.0, basis.energies()[m] * t / cs.hbar) * inner_product(basis.state(m), cmp.grid.psi[k]);
      row.push_back(g.real());
      row.push_back(g.imag());
    }
    route.add_row(std::move(row));
  }
  Table rt = make_table("rabi", {"t", "population_1", "oracle"});
  double rabi_error = 0.0;
  for (std::size_t k = 0; k < rabi.t.size(); ++k) {
    const double p = std::norm(rabi.a[k][1]);
    const double o = std::pow(std::sin(V * rabi.t[k] / cs.hbar), 2);
    rabi_error = std::max(rabi_error, std::abs(p - o));
    rt.add_row({rabi.t[k], p, o});
  }
  Table summary = make_table("summary", {"clock_duration", "channels", "basis_defect", "max_deviation",
                                         "final_population_1", "tunnel_splitting", "gap_to_next", "rabi_max_error"});
  const auto next = system_eigenstates(cs.V_sys, cs.m, cs.hbar, xg, 3, StencilOrder::second).energies();
  summary.add_row({T, static_cast<double>(basis.size()), cmp.defect, cmp.max_deviation,
                   std::norm(cmp.amplitudes.a.back()[1]), next[1] - next[0], next[2] - next[1], rabi_error});
  return {route, rt, summary};
}

// ---------------------------------------------------------------------------

std::vector<Table> run_beam_on_atom(const ScenarioConfig& c, StageLog& log) {
  const auto& cs = c.composite;
  const Grid1D xg(c.grid.x_min, c.grid.x_max, c.grid.nx);
  const Grid1D Rg(c.grid.R_min, c.grid.R_max, c.grid.nR);
  const dynamics::SystemPart sys{cs.V_sys, cs.m, cs.hbar, xg};
  const auto basis = log.run("system_basis", [&] {
    return system_eigenstates(cs.V_sys, cs.m, cs.hbar, xg, c.solver.channels, StencilOrder::second);
  });
  const auto tmap = log.run("clock", [&] {
    return classical::clock_time_map(classical::ClockModel{cs.V_env, cs.M, *cs.E_c, Rg});
  });
  const double T = tmap.t().back();
  const auto& V_int = cs.V_int;
  const dynamics::Interaction V_I = [&](double x, double t) { return eval(V_int, x, tmap.R_at(t)); };
  const auto traj = log.run("propagate", [&] {
    return dynamics::propagate_tdse(sys, V_I, basis.state(0), dynamics::uniform_times(0.0, T, c.dynamics.steps));
  });

  std::vector<std::string> cols{"t", "R", "norm"};
  for (std::size_t n = 0; n < basis.size(); ++n) cols.push_back("population_" + std::to_string(n));
  Table pops = make_table("populations", cols);
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    std::vector<double> row{traj.t[k], tmap.R_at(traj.t[k]), traj.norms[k]};
    for (std::size_t n = 0; n < basis.size(); ++n) row.push_back(std::norm(inner_product(basis.state(n), traj.psi[k])));
    pops.add_row(std::move(row));
  }

  // First order for a pulse A·x·exp(−(R − R0)²/2σ²) crossed at the mean clock velocity:
  // P₁ = (A x₀₁/ħ)² 2πσ²/v² exp(−ω²σ²/v²).
  double predicted = std::nan("");
  const double v = (Rg.max() - Rg.min()) / T;
  if (const auto* w = std::get_if<WindowedPulse>(&V_int); w && std::holds_alternative<Linear>(w->h)) {
    const double A = w->amplitude * std::get<Linear>(w->h).slope;
    const double x01 = matrix_element_x(basis.state(0), basis.state(1));
    const double omega = (basis.energies()[1] - basis.energies()[0]) / cs.hbar;
    const double a = A * x01 / cs.hbar;
    predicted = a * a * 2.0 * std::numbers::pi * w->sigma * w->sigma / (v * v) *
                std::exp(-omega * omega * w->sigma * w->sigma / (v * v));
  }
  const double measured = pops.rows.back()[4];
  double drift = 0.0;
  for (double n : traj.norms) drift = std::max(drift, std::abs(n - traj.norms.front()));
  Table summary = make_table("summary", {"clock_velocity", "duration", "excitation_measured",
                                         "excitation_first_order", "relative_difference", "norm_drift"});
  summary.add_row({v, T, measured, predicted, std::abs(measured - predicted) / predicted, drift});
  return {pops, summary};
}

// ---------------------------------------------------------------------------

std::vector<Table> run_classical_emergence(const ScenarioConfig& c, StageLog& log) {
  classical::ClassicalEmergenceSetup st;
  st.V_env = c.composite.V_env;
  st.V_sys = c.composite.V_sys;
  st.V_int = c.composite.V_int;
  st.m = c.composite.m;
  st.x0 = c.dynamics.x0;
  st.p0 = c.dynamics.p0;
  st.v = c.dynamics.v;
  st.R0 = c.grid.R_min;
  st.span = c.dynamics.t_end;
  st.steps = c.dynamics.steps;
  const auto& masses = c.scan.values;
  std::vector<classical::ClassicalScanPoint> pts(masses.size());
  std::vector<std::string> errors(masses.size());
  std::vector<double> seconds(masses.size());
  const auto n = static_cast<std::ptrdiff_t>(masses.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      pts[k] = classical::classical_emergence_point(st, masses[k]);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
    seconds[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  std::vector<double> x, D;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    log.record({"point M=" + format_number(masses[k]), errors[k].empty() ? "ok" : "failed", seconds[k], errors[k]});
    if (errors[k].empty()) {
      x.push_back(pts[k].Mv2);
      D.push_back(pts[k].D);
    }
  }
  const double slope = log.run("fit", [&] { return loglog_slope(x, D); });
  const bool monotone = strictly_decreasing(D);

  Table t = make_table("classical_emergence",
                       {"scan_value", "Mv2", "E", "U_S", "E_c", "D", "ratio_measured", "ratio_estimate",
                        "shift_measured", "shift_predicted", "v_mean", "energy_drift", "ok", "slope_fit"});
  double worst_shift = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    const auto& p = pts[k];
    const bool ok = errors[k].empty();
    if (ok) worst_shift = std::max(worst_shift, std::abs(p.shift_measured - p.shift_predicted) / std::abs(p.shift_predicted));
    t.add_row({masses[k], p.Mv2, p.E, p.U_S, p.E_c, p.D, p.ratio_measured, p.ratio_estimate, p.shift_measured,
               p.shift_predicted, p.v_mean, p.energy_drift, ok ? 1.0 : 0.0, slope});
  }
  Table summary = make_table("summary", {"slope", "monotone", "points_ok", "max_shift_relative_error"});
  summary.add_row({slope, monotone ? 1.0 : 0.0, static_cast<double>(x.size()), worst_shift});
  return {t, summary};
}

// ---------------------------------------------------------------------------

std::vector<Table> run_jacobi_paths(const ScenarioConfig& c, StageLog& log) {
  using classical::Vec;
  const CompositeSpec spec = c.composite;
  classical::JacobiProblem pb;
  pb.V = [spec](const Vec& q) { return eval(spec.V_env, q[0]) + eval(spec.V_sys, q[1]) + eval(spec.V_int, q[1], q[0]); };
  pb.grad_V = [spec](const Vec& q) {
    Vec g(2);
    g[0] = derivative(spec.V_env, q[0]) + derivative_R(spec.V_int, q[1], q[0]);
    g[1] = derivative(spec.V_sys, q[1]) + derivative_x(spec.V_int, q[1], q[0]);
    return g;
  };
  pb.E = *spec.E;
  pb.masses = Eigen::Vector2d(spec.M, spec.m);
  classical::JacobiOptions opt;
  opt.rel_tol = c.solver.tol;
  opt.max_iter = c.solver.max_iter;
  const Vec a = Eigen::Vector2d(c.path.start[0], c.path.start[1]);
  const Vec b = Eigen::Vector2d(c.path.end[0], c.path.end[1]);
  const auto path = log.run("minimize", [&] { return classical::jacobi_path_minimize(pb, a, b, c.path.segments, opt); });
  const auto p = classical::path_momenta(pb, path);
  const auto res = classical::constraint_residuals(pb, path);
  const auto ep = log.run("endpoint_gradient", [&] {
    return classical::endpoint_momentum_check(pb, a, b, c.path.segments, c.path.delta, opt);
  });

  Table pts = make_table("jacobi_path", {"index", "R", "x", "chord_distance"});
  const Vec u = (b - a).normalized();
  double chord = 0.0;
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const Vec d = path.points[i] - a;
    const double off = (d - d.dot(u) * u).norm();
    chord = std::max(chord, off);
    pts.add_row({static_cast<double>(i), path.points[i][0], path.points[i][1], off});
  }
  Table mom = make_table("jacobi_momenta", {"segment", "p_R", "p_x", "constraint_residual"});
  for (std::size_t j = 0; j < p.size(); ++j) mom.add_row({static_cast<double>(j), p[j][0], p[j][1], res[j]});
  Table summary = make_table("summary", {"W", "iterations", "gradient_norm", "max_chord_distance",
                                         "max_constraint_residual", "dW_dR_end", "dW_dx_end", "p_R_end", "p_x_end",
                                         "mismatch_end", "mismatch_start"});
  summary.add_row({path.W, static_cast<double>(path.iterations), path.gradient_norm, chord,
                   *std::max_element(res.begin(), res.end()), ep.dW_dq_end[0], ep.dW_dq_end[1], ep.p_end[0],
                   ep.p_end[1], ep.mismatch_end, ep.mismatch_start});
  return {pts, mom, summary};
}

// ---------------------------------------------------------------------------

std::vector<Table> run_emergence_scan(const ScenarioConfig& c, StageLog& log) {
  dynamics::QuantumEmergenceSetup st;
  st.V_sys = c.composite.V_sys;
  st.V_int = c.composite.V_int;
  st.m = c.composite.m;
  st.hbar = c.composite.hbar;
  st.v = c.dynamics.v;
  st.R_min = c.grid.R_min;
  st.R_max = c.grid.R_max;
  st.x_min = c.grid.x_min;
  st.x_max = c.grid.x_max;
  st.nx = c.grid.nx;
  st.points_per_wavelength = c.solver.points_per_wavelength;
  st.min_nR = c.solver.min_nR;
  st.taper = c.solver.taper;
  st.margin = c.solver.margin;
  st.candidates = c.solver.candidates;
  st.order = c.solver.order;
  st.seed = c.seed;
  const auto rep = log.run("scan", [&] { return dynamics::emergence_scan(st, c.scan.values); });
  std::size_t ok = 0;
  for (const auto& p : rep.points) {
    log.record({"point M=" + format_number(p.M), p.ok ? "ok" : "failed", 0.0, p.error});
    ok += p.ok ? 1 : 0;
  }
  Table t = make_table("emergence_scan", {"scan_value", "Mv2", "E", "U_S", "E_c", "v_mean", "v_spread",
                                          "channel0_weight", "eigen_residual", "nR", "residual", "rho",
                                          "rho_estimate", "ok", "slope_fit"});
  for (const auto& p : rep.points)
    t.add_row({p.M, p.Mv2, p.E, p.U_S, p.E_c, p.v_mean, p.v_spread, p.channel0_weight, p.eigen_residual,
               static_cast<double>(p.nR), p.residual, p.rho, p.rho_estimate, p.ok ? 1.0 : 0.0, rep.slope});
  double span = 0.0;
  std::vector<double> x;
  for (const auto& p : rep.points)
    if (p.ok) x.push_back(p.Mv2);
  if (x.size() >= 2) span = x.back() / x.front();
  Table summary = make_table("summary", {"slope", "monotone", "points_ok", "Mv2_span"});
  summary.add_row({rep.slope, rep.monotone ? 1.0 : 0.0, static_cast<double>(ok), span});
  return {t, summary};
}

}  // namespace

const std::vector<ScenarioInfo>& list_scenarios() {
  static const std::vector<ScenarioInfo> registry{
      {"perfect-clock", "Free clock at fixed momentum: quantum time vs classical time, and the imaginary time of a real Gaussian clock state", {}},
      {"harmonic-clock-two-level", "Double-well system driven through a windowed pulse by a harmonic clock: amplitude equations vs grid propagation, plus the degenerate Rabi limit", {}},
      {"beam-on-atom", "Fast free particle passing an oscillator: reduced propagation vs first-order excitation probability", {}},
      {"classical-emergence", "Classical composite vs reduced time-dependent system over a clock-mass scan", {"M"}},
      {"jacobi-paths", "Stationary Jacobi-action path with momenta, constraint residuals and the endpoint gradient identity", {}},
      {"emergence-scan", "Conditional-wavefunction TDSE residual and neglected-to-retained ratio over a clock-mass scan", {"M"}},
  };
  return registry;
}

const ScenarioInfo& find_scenario(const std::string& name) {
  for (const auto& s : list_scenarios())
    if (s.name == name) return s;
  throw ConfigError("/scenario", "unknown scenario \"" + name + "\"");
}

Json default_document(const std::string& name) {
  const auto& info = find_scenario(name);
  Json d = base_document();
  d["scenario"] = info.name;
  d["output_dir"] = "out/" + info.name;
  const Json patch = Json::parse(scenario_patch(info.name));
  // Patches only refine sections; potentials inside them replace the base entry whole.
  for (const auto& [section, body] : patch.items())
    for (const auto& [k, v] : body.items()) d[section][k] = v;
  return d;
}

std::vector<Table> run_pipeline(const ScenarioConfig& c, StageLog& log) {
  if (c.scenario == "perfect-clock") return run_perfect_clock(c, log);
  if (c.scenario == "harmonic-clock-two-level") return run_harmonic_clock_two_level(c, log);
  if (c.scenario == "beam-on-atom") return run_beam_on_atom(c, log);
  if (c.scenario == "classical-emergence") return run_classical_emergence(c, log);
  if (c.scenario == "jacobi-paths") return run_jacobi_paths(c, log);
  if (c.scenario == "emergence-scan") return run_emergence_scan(c, log);
  throw ConfigError("/scenario", "unknown scenario \"" + c.scenario + "\"");
}

}  // namespace emtime::harness
