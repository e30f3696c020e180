// Acceptance checks: one PASS/FAIL line per criterion, exit code 1 if any fails.
//
//   superrad_acceptance [--only ID]... [--skip-performance]

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "superrad/analysis.hpp"
#include "superrad/dense.hpp"
#include "superrad/model.hpp"
#include "superrad/permbasis.hpp"
#include "superrad/pibs.hpp"
#include "superrad/semiclassical.hpp"

using namespace superrad;
namespace an = superrad::analysis;
namespace sc = superrad::semiclassical;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> grid(double t_end, int points) {
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) t[static_cast<std::size_t>(k)] = t_end * k / (points - 1);
  return t;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

ModelParams tc_params(int n) {
  ModelParams p;
  p.n_emitters = n;
  p.g_collective = 0.4;
  p.delta = -0.35;
  p.kappa = 0.01;
  p.gamma = 0.001;
  p.gamma_phi = 0.0075;
  return validate(p);
}

ModelParams htc_params(double s, double delta = 0.0) {
  ModelParams p;
  p.n_emitters = 100'000'000;
  p.g_collective = 0.2;
  p.delta = delta;
  p.kappa = 0.01;
  p.gamma = 1e-6;
  p.huang_rhys = s;
  p.omega_nu = 0.15;
  p.gamma_nu = 0.01;
  p.temperature = 0.026;
  return validate(p);
}

ModelParams closed(int n, double g_collective) {
  ModelParams p;
  p.n_emitters = n;
  p.g_collective = g_collective;
  return validate(p);
}

pibs::SolveOptions pibs_options(std::vector<double> t, double rtol, double atol) {
  pibs::SolveOptions o;
  o.t_grid_fs = std::move(t);
  o.rtol = rtol;
  o.atol = atol;
  return o;
}

dense::EvolveOptions dense_options(double rtol, double atol) {
  dense::EvolveOptions o;
  o.ode.rtol = rtol;
  o.ode.atol = atol;
  o.positivity_dimension = 0;
  return o;
}

sc::Trajectory mf(const ModelParams& p, double theta, std::vector<double> t, sc::Method m = sc::Method::MF) {
  sc::SolveOptions o;
  o.t_grid_fs = std::move(t);
  return sc::solve(m, p, {theta, true}, o);
}

// Risetime sweeps on the resonant vibronic parameter set.
constexpr double kTheta = 1e-3 * kPi;

an::SweepSpec sweep(an::Axis axis, std::vector<double> values, double s = 0.0, double gamma_phi = 0.0) {
  an::SweepSpec spec;
  spec.axis = axis;
  spec.values = std::move(values);
  spec.solver = an::Solver::MF;
  spec.base = htc_params(s);
  spec.base.gamma_phi = gamma_phi;
  spec.init = {kTheta, true};
  spec.t_grid_fs = grid(100.0, 1001);
  return spec;
}

std::optional<double> tau(const an::SweepPoint& p) {
  if (p.error || !p.fit || !p.fit->well_defined) return std::nullopt;
  return p.fit->tau_fs;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  double worst_ratio = 0.0;
  std::string where;
  for (int n = 1; n <= 5; ++n) {
    for (double theta : {0.0, kPi / 4}) {
      const ModelParams p = tc_params(n);
      const auto t = grid(100.0, 201);
      const auto exact = pibs::solve(p, {theta}, pibs_options(t, 1e-11, 1e-13));
      const auto ref = dense::evolve(p, {}, {theta}, t, dense_options(1e-12, 1e-14));
      const double ratio = max_abs_diff(exact.photon_mean, ref.photon_mean) / (1e-8 * n);
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        where = fmt("N=%d theta=%.4f", n, theta);
      }
    }
  }
  return {worst_ratio <= 1.0, fmt("worst max|dn|/(1e-8 N) = %.3g at %s", worst_ratio, where.c_str())};
}

Outcome analytic_single_emitter() {
  const double g = 0.1;
  const ModelParams p = closed(1, g);
  const auto t = grid(100.0, 401);
  std::vector<double> expected(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) expected[k] = std::pow(std::sin(g * UnitSystem::fs_to_internal(t[k])), 2);
  const double e_pibs = max_abs_diff(pibs::solve(p, {0.0}, pibs_options(t, 1e-11, 1e-13)).photon_mean, expected);
  const double e_dense = max_abs_diff(dense::evolve(p, {}, {0.0}, t, dense_options(1e-12, 1e-14)).photon_mean, expected);
  const double e_mf = max_abs_diff(mf(p, 0.0, t).photon_per_emitter, expected);
  const bool pass = e_pibs <= 1e-8 && e_dense <= 1e-8 && e_mf <= 1e-8;
  return {pass, fmt("max error exact %.2e, dense %.2e, mean field %.2e (fully excited start is a mean-field "
                    "fixed point)", e_pibs, e_dense, e_mf)};
}

Outcome basis_counting() {
  bool ok = pattern_count(10) == 286 && pattern_count(140) == 477191;
  for (int n = 1; n <= 140 && ok; ++n) {
    const auto full = static_cast<std::int64_t>(std::llround(binomial(n + 3, 3)));
    ok = ok && pattern_count(n) == full && block_size(n, 0) == 1 && block_size(n, n) == full;
    for (int nu = 1; nu <= n && ok; ++nu) ok = block_size(n, nu) > block_size(n, nu - 1);
  }
  const bool enumerated = static_cast<std::int64_t>(enumerate_patterns(40).size()) == pattern_count(40);
  return {ok && enumerated, fmt("C(N+3,3) for N=1..140, 286 at N=10, %lld at N=140, block sizes 1..C(N+3,3) "
                                "strictly rising: %s",
                                static_cast<long long>(pattern_count(140)), ok && enumerated ? "yes" : "no")};
}

Outcome conservation() {
  std::vector<std::string> failures;
  // trace
  double trace_pibs = 0.0, trace_dense = 0.0;
  for (int n : {3, 5, 12}) {
    const auto t = grid(200.0, 81);
    const auto e = pibs::solve(tc_params(n), {kPi / 3}, pibs_options(t, 1e-8, 1e-10));
    trace_pibs = std::max(trace_pibs, max_of(e.trace_residual) / 1e-8);
    if (n <= 5) {
      const auto d = dense::evolve(tc_params(n), {}, {kPi / 3}, t, dense_options(1e-10, 1e-12));
      trace_dense = std::max(trace_dense, max_of(d.trace_residual) / 1e-10);
    }
  }
  if (trace_pibs > 10.0 || trace_dense > 10.0) failures.push_back("trace");
  // closed-system excitation number
  double excitation = 0.0;
  {
    ModelParams p = closed(7, 0.3);
    p.delta = -0.1;
    const auto t = grid(100.0, 41);
    const auto e = pibs::solve(p, {2.0}, pibs_options(t, 1e-10, 1e-12));
    ModelParams q = closed(3, 0.4);
    const auto d = dense::evolve(q, {}, {0.7, false}, t, dense_options(1e-10, 1e-12));
    for (std::size_t k = 0; k < t.size(); ++k) {
      excitation = std::max(excitation, std::abs(e.photon_mean[k] + 3.5 * (1 + e.sz_mean[k]) - e.photon_mean[0] -
                                                 3.5 * (1 + e.sz_mean[0])));
      excitation = std::max(excitation, std::abs(d.photon_mean[k] + 1.5 * (1 + d.sz_mean[k]) - d.photon_mean[0] -
                                                 1.5 * (1 + d.sz_mean[0])));
    }
  }
  if (excitation > 1e-8) failures.push_back("excitation");
  // mean-field spin length with gamma = gamma_phi = 0, any S
  double spin = 0.0;
  for (double s : {0.0, 0.2, 0.5}) {
    ModelParams p = htc_params(s);
    p.gamma = 0.0;
    const auto tr = mf(p, 0.4, grid(300.0, 301));
    const double n2 = 0.25 * p.n_emitters * static_cast<double>(p.n_emitters);
    for (double j2 : tr.j2) spin = std::max(spin, std::abs(j2 / n2 - 1.0));
  }
  if (spin > 1e-9) failures.push_back("spin length");
  // <J^2> = N^2/4 along the S = gamma_phi = 0 trajectory
  double j2_mf = 0.0;
  {
    ModelParams p = htc_params(0.0);
    p.gamma = 0.0;
    const auto tr = mf(p, kTheta, grid(150.0, 301));
    const double n2 = 0.25 * p.n_emitters * static_cast<double>(p.n_emitters);
    for (double j2 : tr.j2) j2_mf = std::max(j2_mf, std::abs(j2 / n2 - 1.0));
  }
  if (j2_mf > 1e-9) failures.push_back("J^2");
  std::string status = failures.empty() ? "" : " failed:";
  for (const auto& f : failures) status += " " + f;
  return {failures.empty(),
          fmt("max trace residual / rtol: exact %.2g, dense %.2g; excitation drift %.1e; spin length %.1e; "
              "|<J^2>/(N^2/4) - 1| %.1e%s",
              trace_pibs, trace_dense, excitation, spin, j2_mf, status.c_str())};
}

Outcome cumulant_convergence() {
  const auto t = grid(100.0, 401);
  const auto ref = mf(tc_params(100), kPi / 4, t).photon_per_emitter;
  const double scale = max_of(ref);
  std::vector<double> normalized, pointwise;
  for (int n : {100, 1000, 10000}) {
    const auto c2 = mf(tc_params(n), kPi / 4, t, sc::Method::C2).photon_per_emitter;
    double worst = 0.0, worst_point = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) {
      worst = std::max(worst, std::abs(c2[k] - ref[k]));
      worst_point = std::max(worst_point, std::abs(c2[k] / ref[k] - 1.0));
    }
    normalized.push_back(worst / scale);
    pointwise.push_back(worst_point);
  }
  const bool pass = normalized[1] < normalized[0] && normalized[2] < normalized[1] && normalized[2] <= 0.05;
  return {pass, fmt("max|dn/N| / max(n/N): %.3g, %.3g, %.3g for N=1e2,1e3,1e4 (pointwise relative %.3g, %.3g, %.3g)",
                    normalized[0], normalized[1], normalized[2], pointwise[0], pointwise[1], pointwise[2])};
}

Outcome superfluorescent_short_time() {
  const int n = 30;
  const ModelParams p = tc_params(n);
  const auto t = grid(100.0, 401);
  const auto exact = pibs::solve(p, {0.0}, pibs_options(t, 1e-8, 1e-10));
  const auto c2 = mf(p, 0.0, t, sc::Method::C2);
  std::size_t peak = 1;
  while (peak + 1 < t.size() && exact.photon_mean[peak + 1] >= exact.photon_mean[peak]) ++peak;
  double early = 0.0, late = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double rel = std::abs(c2.photon_per_emitter[k] * n / exact.photon_mean[k] - 1.0);
    if (k <= peak) {
      early = std::max(early, rel);
    } else {
      late = std::max(late, rel);
    }
  }
  const double at_peak = std::abs(c2.photon_per_emitter[peak] * n / exact.photon_mean[peak] - 1.0);
  return {early <= 0.05, fmt("first peak of <n> at %.2f fs; relative deviation %.3g at the peak, max %.3g up to it, "
                             "%.3g after",
                             t[peak], at_peak, early, late)};
}

Outcome vibronic_window() {
  const auto points = an::run_sweep(sweep(an::Axis::S, {0.0, 0.1, 0.2, 0.3, 0.5}));
  std::string taus;
  bool ok = true;
  std::optional<double> previous;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const auto v = tau(points[k]);
    taus += v ? fmt(" %.3f", *v) : std::string(" none");
    ok = ok && v && (!previous || *v > *previous);
    previous = v;
  }
  const bool none_at_half = !tau(points.back()) && !points.back().error;
  return {ok && none_at_half, fmt("tau(S=0,0.1,0.2,0.3) =%s fs; S=0.5 window %s", taus.c_str(),
                                  none_at_half ? "absent" : "present")};
}

Outcome detuning_asymmetry() {
  std::vector<std::string> failures;
  const std::vector<double> magnitudes{0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  std::vector<double> symmetric;
  for (double m : magnitudes) {
    symmetric.push_back(-m);
    symmetric.push_back(m);
  }
  double worst = 0.0;
  int missing = 0;
  const auto asymmetry = [&](const std::vector<an::SweepPoint>& pts) {
    for (std::size_t k = 0; k + 1 < pts.size(); k += 2) {
      const auto a = tau(pts[k]);
      const auto b = tau(pts[k + 1]);
      if (!a || !b) {
        ++missing;
        continue;
      }
      worst = std::max(worst, std::abs(*a - *b) / std::min(*a, *b));
    }
  };
  asymmetry(an::run_sweep(sweep(an::Axis::Delta, symmetric)));
  for (double gp : {0.01, 0.02, 0.04, 0.06, 0.1}) asymmetry(an::run_sweep(sweep(an::Axis::Delta, symmetric, 0.0, gp)));
  if (worst > 0.02 || missing > 0) failures.push_back("symmetry");

  const std::vector<double> deltas{-0.3, -0.25, -0.2, -0.15, -0.1, -0.05, 0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  const auto s02 = an::run_sweep(sweep(an::Axis::Delta, deltas, 0.2));
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < s02.size(); ++k) {
    if (tau(s02[k]) && (!best || *tau(s02[k]) < *tau(s02[*best]))) best = k;
  }
  const double argmin = best ? s02[*best].value : std::nan("");
  if (!(argmin < 0.0)) failures.push_back("argmin");
  const auto minus = tau(s02[3]);
  const auto plus = tau(s02[9]);
  if (!minus || !plus || !(*minus < *plus)) failures.push_back("tau(-0.15) < tau(+0.15)");

  // early rise at delta = -0.3: time for <n>/N to reach 1e-4
  const auto t = grid(100.0, 2001);
  const auto reach = [&](double s) {
    const auto n = mf(htc_params(s, -0.3), kTheta, t).photon_per_emitter;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (n[k] >= 1e-4) return t[k];
    }
    return std::nan("");
  };
  const double t0 = reach(0.0), t2 = reach(0.2);
  if (!(t2 < t0)) failures.push_back("early rise");

  std::string status = failures.empty() ? "" : "; failed:";
  for (const auto& f : failures) status += " " + f;
  return {failures.empty(),
          fmt("max tau asymmetry %.3g (%d pairs without window) for S=0 and gamma_phi<=0.1; S=0.2 argmin at "
              "delta=%.2f, tau(-0.15)=%.3f, tau(+0.15)=%.3f; at delta=-0.3 n/N reaches 1e-4 at %.2f fs (S=0.2) vs "
              "%.2f fs (S=0)%s",
              worst, missing, argmin, minus.value_or(std::nan("")), plus.value_or(std::nan("")), t2, t0,
              status.c_str())};
}

Outcome thermalization() {
  ModelParams p = htc_params(0.0);
  p.n_emitters = 1;
  p.g_collective = 0.0;
  p.g = 0.0;
  dense::DenseConfig cfg;
  cfg.model = dense::Model::HTC;
  cfg.n_photon_levels = 2;
  cfg.n_vib_levels = 5;
  const auto d = dense::evolve(p, cfg, {0.0, false}, grid(4000.0, 41), dense_options(1e-10, 1e-12));
  const double nb = bose_occupation(0.15, 0.026);
  const double offset = std::abs(d.b_occupation.back() - nb);

  bool invariant = true;
  for (double s : {0.0, 0.2}) {
    const auto cold = mf(htc_params(s), kTheta, grid(200.0, 201));
    ModelParams hot_params = htc_params(s);
    hot_params.temperature = 0.1;
    const auto hot = mf(hot_params, kTheta, grid(200.0, 201));
    invariant = invariant && cold.photon_per_emitter == hot.photon_per_emitter && cold.sz_mean == hot.sz_mean;
  }
  return {offset <= 1e-5 && invariant,
          fmt("<b^dagger b> relaxes to %.6e, n_B = %.6e, offset %.2e; mean field %s under T = 0.026 -> 0.1 eV",
              d.b_occupation.back(), nb, offset, invariant ? "invariant" : "changes")};
}

Outcome performance() {
  const auto start = std::chrono::steady_clock::now();
  const auto e = pibs::solve(tc_params(60), {0.0}, pibs_options(grid(100.0, 2000), 1e-8, 1e-10));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  const double peak_gb = usage.ru_maxrss / 1048576.0;
  return {wall < 600.0 && peak_gb < 8.0 && e.photon_mean.size() == 2000,
          fmt("N=60, 2000 outputs: %.1f s wall, peak resident memory %.2f GB, %zu steps", wall, peak_gb,
              e.stats.accepted)};
}

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<std::string> only;
  bool skip_performance = false;
  app.add_option("--only", only, "run only these criteria (repeatable)");
  app.add_flag("--skip-performance", skip_performance, "skip the N=60 timing run");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"oracle", "exact solver matches the dense oracle", oracle_equivalence},
      {"analytic", "closed single emitter gives sin^2(g t)", analytic_single_emitter},
      {"basis", "pattern and block counting", basis_counting},
      {"conservation", "trace, excitation, spin length, total spin", conservation},
      {"cumulant-mf", "cumulants converge to mean field with N", cumulant_convergence},
      {"sf-short-time", "cumulants track the exact superfluorescent rise", superfluorescent_short_time},
      {"vibronic-window", "exponential window for S <= 0.3, none at S = 0.5", vibronic_window},
      {"detuning", "detuning asymmetry of the risetime", detuning_asymmetry},
      {"thermalization", "vibrational thermalization and temperature invariance", thermalization},
      {"performance", "exact solver, N = 60, under 10 min and 8 GB", performance},
  };

  const std::set<std::string> selected(only.begin(), only.end());
  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    if (c.id == "performance" && skip_performance) {
      std::printf("SKIP  %-16s %s\n", c.id.c_str(), c.title.c_str());
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %-16s %s [%.1f s]\n      %s\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(), seconds,
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
