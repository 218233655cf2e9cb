// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <unistd.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "emtime/classical/jacobi.hpp"
#include "emtime/core/channel_basis.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/quadrature.hpp"
#include "emtime/dynamics/tdse.hpp"
#include "emtime/harness/runner.hpp"
#include "emtime/semiclassics/quantum_time.hpp"
#include "emtime/stationary/channels.hpp"
#include "emtime/stationary/factorization.hpp"
#include "emtime/stationary/hamiltonian.hpp"

using namespace emtime;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

CompositeSpec harmonic_spec(double M, double KR, double m, double kx, double lambda = 0.0, double xc = 0.0) {
  CompositeSpec s;
  s.M = M;
  s.m = m;
  s.V_env = Harmonic{KR, 0.0};
  s.V_sys = Harmonic{kx, xc};
  if (lambda != 0.0) s.V_int = Bilinear{lambda};
  return s;
}

/// Column name → values of a CSV written by the harness.
using Columns = std::map<std::string, std::vector<double>>;

Columns read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("missing " + p.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::string> names;
  std::stringstream hs(line);
  for (std::string c; std::getline(hs, c, ',');) names.push_back(c);
  Columns cols;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::size_t j = 0;
    for (std::string c; std::getline(ls, c, ','); ++j) cols[names.at(j)].push_back(std::strtod(c.c_str(), nullptr));
  }
  return cols;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const fs::path& work_dir() {
  static const fs::path dir = fs::temp_directory_path() / ("emtime_acceptance_" + std::to_string(::getpid()));
  return dir;
}

/// Every builtin scenario run twice into separate directories.
struct BuiltinRuns {
  std::map<std::string, harness::RunManifest> first, second;

  BuiltinRuns() {
    for (const auto& s : harness::list_scenarios()) {
      harness::RunOptions a, b;
      a.out_dir = (work_dir() / "a" / s.name).string();
      b.out_dir = (work_dir() / "b" / s.name).string();
      first[s.name] = harness::run_source(s.name, a);
      second[s.name] = harness::run_source(s.name, b);
    }
  }
  fs::path dir(const std::string& name) const { return fs::path(first.at(name).output_dir); }
  bool ok(const std::string& name) const { return first.at(name).exit_code == harness::exit_ok; }
};

const BuiltinRuns& builtin_runs() {
  static const BuiltinRuns runs;
  return runs;
}

// ---------------------------------------------------------------------------

Outcome factorization_identity() {
  double worst = 0.0;
  std::size_t states = 0;
  auto check = [&](const ComplexField2D& Psi, const ComplexField1D& chi, const CompositeSpec& spec) {
    const auto st = stationary::factorize_prescribed(Psi, chi, spec);
    for (std::size_t iR = st.window_lo; iR <= st.window_hi; ++iR)
      for (std::size_t ix = 0; ix < Psi.grid().nx(); ++ix)
        worst = std::max(worst, std::abs(chi[iR] * st.psi(ix, iR) - Psi(ix, iR)));
    ++states;
  };
  // Coupled composite: prescribed marginal and a complex WKB-like clock factor.
  const auto coupled = harmonic_spec(4.0, 4.0, 1.0, 1.0, 0.2, 1.0);
  const Grid2D g(Grid1D(-6, 8, 71), Grid1D(-4, 4, 61));
  const auto wkb = ComplexField1D::sample(g.R(), [](double R) {
    const double p = std::sqrt(2.0 * 4.0 * (10.0 - 0.5 * R * R));
    return std::polar(1.0 / std::sqrt(p), 3.0 * R + 0.1 * R * R * R);
  });
  const auto pairs = stationary::solve_eigenpairs(stationary::assemble_tise(coupled, g), 0.0, 4, 3);
  for (const auto& pr : pairs) check(pr.field, wkb, coupled);
  check(pairs[0].field, stationary::marginal_amplitude(pairs[0].field), coupled);
  // Separable composite eigenstates.
  const auto sep = harmonic_spec(1.0, 1.0, 1.0, 2.0);
  const Grid2D gs(Grid1D(-8, 8, 81), Grid1D(-9, 9, 91));
  const auto chi_s = ComplexField1D::sample(gs.R(), [](double R) { return std::polar(1.0 + 0.1 * R * R, 0.7 * R); });
  for (const auto& pr : stationary::solve_eigenpairs(stationary::assemble_tise(sep, gs), 0.0, 3, 5)) check(pr.field, chi_s, sep);
  return {worst < 1e-12, fmt("max |chi psi - Psi| = %.2e over %.0f states", worst, static_cast<double>(states))};
}

Outcome eigen_quality() {
  const auto s = harmonic_spec(1.0, 1.0, 1.0, 2.0);
  const Grid2D g(Grid1D(-8, 8, 128), Grid1D(-9, 9, 128));
  const auto H = stationary::assemble_tise(s, g);
  const auto pairs = stationary::solve_eigenpairs(H, 0.0, 6, 42);
  std::vector<double> exact;
  for (int n = 0; n < 8; ++n)
    for (int j = 0; j < 8; ++j) exact.push_back((n + 0.5) + (j + 0.5) * std::sqrt(2.0));
  std::sort(exact.begin(), exact.end());
  double rel = 0.0, res = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    rel = std::max(rel, std::abs(pairs[i].energy - exact[i]) / exact[i]);
    auto r = H.apply(pairs[i].field);
    for (std::size_t q = 0; q < r.size(); ++q) r.values()[q] -= pairs[i].energy * pairs[i].field.values()[q];
    res = std::max(res, norm(r) / std::abs(pairs[i].energy));
  }
  return {pairs.size() == 6 && rel < 1e-4 && res < 1e-8,
          fmt("128x128: max relative eigenvalue error %.2e, max ||(H-E)Psi||/|E| %.2e", rel, res)};
}

Outcome perfect_clock() {
  const double M = 3.0, P = 7.0;
  const Grid1D Rg(0.0, 5.0, 2001);
  const auto pc = semiclassics::perfect_clock(M, P, Rg);
  const auto tau = semiclassics::quantum_time(pc.chi, M);
  double plane = 0.0;
  for (std::size_t i = 1; i < Rg.size(); ++i) {
    const double t = M * Rg[i] / P;
    plane = std::max(plane, std::abs(tau.tau[i] - t) / t);
  }
  // χ = exp(−M R²/2ħ) gives τ = −i ln(R/R₀).
  const Grid1D Rgg(1.0, 2.0, 4001);
  const auto chi = ComplexField1D::sample(Rgg, [&](double R) { return std::exp(-M * R * R / 2.0); });
  const auto gt = semiclassics::quantum_time(chi, M);
  double gauss = 0.0;
  for (std::size_t i = 0; i < Rgg.size(); ++i)
    gauss = std::max(gauss, std::abs(gt.tau[i] - cplx(0.0, -std::log(Rgg[i] / Rgg[0]))));
  return {plane < 1e-10 && gauss < 1e-6,
          fmt("plane wave max relative error %.2e; Gaussian max |tau + i ln(R/R0)| %.2e", plane, gauss)};
}

Outcome emergence_exponent() {
  const auto& runs = builtin_runs();
  if (!runs.ok("emergence-scan")) return {false, "emergence-scan run failed: " + runs.first.at("emergence-scan").error};
  const auto t = read_csv(runs.dir("emergence-scan") / "emergence_scan.csv");
  const auto& x = t.at("Mv2");
  const auto& rho = t.at("rho");
  const auto& res = t.at("residual");
  // Independent least-squares fit of log ρ against log Mv².
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(rho[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  bool monotone = true;
  for (std::size_t i = 1; i < res.size(); ++i) monotone = monotone && res[i] < res[i - 1];
  const double span = x.back() / x.front();
  bool all_ok = true;
  for (double v : t.at("ok")) all_ok = all_ok && v == 1.0;
  return {all_ok && span >= 30.0 && slope >= -1.3 && slope <= -0.7 && monotone,
          fmt("Mv^2 span x%.1f, slope %.4f, residual monotone %.0f", span, slope, monotone ? 1.0 : 0.0)};
}

Outcome two_route() {
  const auto& runs = builtin_runs();
  if (!runs.ok("harmonic-clock-two-level"))
    return {false, "harmonic-clock-two-level run failed: " + runs.first.at("harmonic-clock-two-level").error};
  const auto dir = runs.dir("harmonic-clock-two-level");
  const auto route = read_csv(dir / "two_route.csv");
  const auto summary = read_csv(dir / "summary.csv");
  double dev = 0.0;
  for (int m = 0;; ++m) {
    const auto k = std::to_string(m);
    if (!route.count("re_a" + k)) break;
    for (std::size_t i = 0; i < route.at("t").size(); ++i) {
      const cplx a(route.at("re_a" + k)[i], route.at("im_a" + k)[i]);
      const cplx b(route.at("re_grid_a" + k)[i], route.at("im_grid_a" + k)[i]);
      dev = std::max(dev, std::abs(a - b));
    }
  }
  const auto rabi = read_csv(dir / "rabi.csv");
  const double V = 0.2;  // the scenario's default rabi_coupling, hbar = 1
  double rabi_err = 0.0;
  for (std::size_t i = 0; i < rabi.at("t").size(); ++i)
    rabi_err = std::max(rabi_err, std::abs(rabi.at("population_1")[i] - std::pow(std::sin(V * rabi.at("t")[i]), 2)));
  const double defect = summary.at("basis_defect")[0];
  return {dev < 1e-3 && defect < 1e-6 && rabi_err < 1e-6,
          fmt("max channel deviation %.2e, basis defect %.2e, Rabi max error %.2e", dev, defect, rabi_err)};
}

Outcome classical_emergence() {
  const auto& runs = builtin_runs();
  if (!runs.ok("classical-emergence"))
    return {false, "classical-emergence run failed: " + runs.first.at("classical-emergence").error};
  const auto t = read_csv(runs.dir("classical-emergence") / "classical_emergence.csv");
  const auto& x = t.at("Mv2");
  const auto& D = t.at("D");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(D[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  bool monotone = true;
  for (std::size_t i = 1; i < D.size(); ++i) monotone = monotone && D[i] < D[i - 1];
  double shift = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    shift = std::max(shift, std::abs(t.at("shift_measured")[i] - t.at("shift_predicted")[i]) /
                                std::abs(t.at("shift_predicted")[i]));
  return {monotone && slope >= -1.5 && slope <= -0.5 && shift < 0.1,
          fmt("deviation slope %.4f, monotone %.0f, max energy-shift mismatch %.1f%%", slope, monotone ? 1.0 : 0.0,
              100.0 * shift)};
}

Outcome jacobi() {
  using classical::Vec;
  // Free particle from a bent seed.
  classical::JacobiProblem free;
  free.V = [](const Vec&) { return 0.0; };
  free.grad_V = [](const Vec& q) { return Vec::Zero(q.size()); };
  free.E = 1.0;
  const Vec a = Eigen::Vector2d(0.0, 0.0), b = Eigen::Vector2d(1.0, 1.0);
  classical::JacobiOptions opt;
  std::vector<Vec> seed;
  for (int i = 0; i <= 16; ++i) {
    const double u = i / 16.0;
    seed.push_back(Eigen::Vector2d(u, u + 0.2 * std::sin(pi * u)));
  }
  opt.seed = seed;
  const auto path = classical::jacobi_path_minimize(free, a, b, 16, opt);
  double collinear = 0.0;
  for (const auto& q : path.points) collinear = std::max(collinear, std::abs(q[0] - q[1]) / std::sqrt(2.0));
  double constraint = 0.0;
  for (double r : classical::constraint_residuals(free, path)) constraint = std::max(constraint, r / free.E);

  // Harmonic arc q(t) = (cos t, ½ sin t) of V = ½|q|².
  classical::JacobiProblem osc;
  osc.V = [](const Vec& q) { return 0.5 * q.squaredNorm(); };
  osc.grad_V = [](const Vec& q) { return q; };
  osc.E = 0.5 * (1.0 + 0.25);
  auto orbit = [](double t) -> Vec { return Eigen::Vector2d(std::cos(t), 0.5 * std::sin(t)); };
  auto momentum = [](double t) -> Vec { return Eigen::Vector2d(-std::sin(t), 0.5 * std::cos(t)); };
  const double t0 = 0.5 * pi - 0.5, t1 = t0 + 1.0;
  const auto osc_path = classical::jacobi_path_minimize(osc, orbit(t0), orbit(t1), 64);
  for (double r : classical::constraint_residuals(osc, osc_path)) constraint = std::max(constraint, r / osc.E);
  const auto r1 = classical::endpoint_momentum_check(osc, orbit(t0), orbit(t1), 64, 0.04);
  const auto r2 = classical::endpoint_momentum_check(osc, orbit(t0), orbit(t1), 64, 0.02);
  const auto r3 = classical::endpoint_momentum_check(osc, orbit(t0), orbit(t1), 64, 0.01);
  const double order_ratio = (r1.dW_dq_end - r2.dW_dq_end).norm() / (r2.dW_dq_end - r3.dW_dq_end).norm();
  const double gap = (r3.dW_dq_end - momentum(t1)).cwiseAbs().maxCoeff();
  return {collinear < 1e-6 && constraint < 1e-8 && std::abs(order_ratio - 4.0) < 0.6 && gap < 1e-3,
          fmt("collinearity %.2e, constraint residual/E %.2e, probe-difference ratio %.3f, |dW/dq - p| %.2e",
              collinear, constraint, order_ratio, gap)};
}

Outcome propagator() {
  using namespace dynamics;
  const SystemPart osc{Harmonic{1.0, 0.0}, 1.0, 1.0, Grid1D(-8.0, 8.0, 201)};
  const auto basis = system_eigenstates(osc.V_sys, 1.0, 1.0, osc.x_grid, 1, StencilOrder::second);
  const Interaction drive = [](double x, double t) { return 0.4 * x * std::sin(1.3 * t); };
  const auto traj = propagate_tdse(osc, drive, basis.state(0), uniform_times(0.0, 30.0, 3000));
  double drift = 0.0;
  for (double n : traj.norms) drift = std::max(drift, std::abs(n - 1.0));
  const double drift_per_1000 = drift / 3.0;

  const SystemPart free{Constant{0.0}, 1.0, 1.0, Grid1D(-25.0, 25.0, 2501)};
  const auto psi0 = ComplexField1D::sample(free.x_grid, [](double x) {
    return std::pow(2.0 * pi, -0.25) * std::exp(-x * x / 4.0);
  });
  const auto packet = propagate_tdse(free, {}, psi0, uniform_times(0.0, 4.0, 1600), {.store_every = 400});
  double width = 0.0;
  for (std::size_t k = 0; k < packet.t.size(); ++k) {
    double x2 = 0.0;
    for (std::size_t i = 0; i < free.x_grid.size(); ++i) x2 += std::norm(packet.psi[k][i]) * std::pow(free.x_grid[i], 2);
    x2 *= free.x_grid.spacing();
    const double expected = 1.0 + std::pow(packet.t[k] / 2.0, 2);
    width = std::max(width, std::abs(x2 - expected) / expected);
  }

  const Interaction V = [](double x, double t) { return 0.5 * x * std::sin(2.0 * t); };
  auto final_state = [&](std::size_t n) { return propagate_tdse(osc, V, basis.state(0), uniform_times(0.0, 2.0, n)).psi.back(); };
  const auto coarse = final_state(100), fine = final_state(200), ref = final_state(800);
  double ec = 0.0, ef = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    ec = std::max(ec, std::abs(coarse[i] - ref[i]));
    ef = std::max(ef, std::abs(fine[i] - ref[i]));
  }
  const double ratio = ec / ef;
  return {drift_per_1000 < 1e-10 && width < 1e-4 && ratio > 3.5 && ratio < 4.5,
          fmt("norm drift per 1000 steps %.2e, dispersion-law error %.2e, step-halving ratio %.3f", drift_per_1000,
              width, ratio)};
}

Outcome close_coupled() {
  const Grid1D xg(-7, 7, 71), Rg(-6, 6, 73);
  const auto s = harmonic_spec(4.0, 4.0, 1.0, 1.0, 0.1);
  const auto pair = stationary::solve_eigenpairs(stationary::assemble_tise(s, Grid2D(xg, Rg)), 0.0, 1, 5).front();
  const auto full = system_eigenstates(s.V_sys, s.m, s.hbar, xg, 8, StencilOrder::fourth);
  auto worst = [&](std::size_t n) {
    const auto r = stationary::close_coupled_residual(stationary::channel_project(pair.field, full.truncated(n)), s, pair.energy);
    return *std::max_element(r.begin(), r.end());
  };
  const double r2 = worst(2), r8 = worst(8);
  double herm = 0.0;
  for (const auto& V : stationary::effective_coupling(full, s, Rg)) herm = std::max(herm, (V - V.adjoint()).cwiseAbs().maxCoeff());
  return {r2 >= 10.0 * r8 && herm < 1e-10,
          fmt("residual 2 channels %.2e, 8 channels %.2e (drop x%.1f), max |V - V^dagger| %.2e", r2, r8, r2 / r8, herm)};
}

Outcome determinism() {
  const auto& runs = builtin_runs();
  std::size_t files = 0;
  std::string bad;
  for (const auto& [name, m] : runs.first) {
    const auto& m2 = runs.second.at(name);
    if (m.exit_code != harness::exit_ok || m2.exit_code != harness::exit_ok) {
      bad += name + " (run failed) ";
      continue;
    }
    for (const auto& o : m.outputs) {
      const auto file = fs::path(o.path).filename();
      if (slurp(fs::path(m.output_dir) / file) != slurp(fs::path(m2.output_dir) / file)) bad += name + "/" + file.string() + " ";
      ++files;
    }
  }
  return {bad.empty() && files > 0,
          bad.empty() ? fmt("%.0f CSV files byte-identical across two runs of every builtin scenario", static_cast<double>(files))
                      : "differs: " + bad};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"factorization identity", factorization_identity},
      {"eigen quality", eigen_quality},
      {"perfect clock", perfect_clock},
      {"emergence exponent", emergence_exponent},
      {"two-route equivalence", two_route},
      {"classical emergence", classical_emergence},
      {"Jacobi paths", jacobi},
      {"propagator contracts", propagator},
      {"close-coupled residuals", close_coupled},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu %s: %s (%s; %.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::error_code ec;
  fs::remove_all(work_dir(), ec);
  return failures == 0 ? 0 : 1;
}
