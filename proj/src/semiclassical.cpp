#include "superrad/semiclassical.hpp"

#include <algorithm>
#include <cmath>

#include "superrad/error.hpp"

namespace superrad::semiclassical {

namespace {

constexpr cplx I{0.0, 1.0};

void check_options(const SolveOptions& opts) {
  if (opts.t_grid_fs.empty()) throw Error(ErrorCode::InvalidParameter, "empty time grid");
  for (std::size_t k = 0; k < opts.t_grid_fs.size(); ++k) {
    if (!std::isfinite(opts.t_grid_fs[k]) || (k > 0 && opts.t_grid_fs[k] <= opts.t_grid_fs[k - 1])) {
      throw Error(ErrorCode::InvalidParameter, "time grid must be finite and strictly increasing");
    }
  }
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "rtol and atol must be > 0");
  }
}

ode::State pack(const MFState& x) {
  ode::State v(4);
  v << x.a, x.s, x.z, x.beta;
  return v;
}

MFState unpack_mf(const ode::State& v) { return {v[0], v[1], v[2].real(), v[3]}; }

ode::State pack(const C2State& x) {
  ode::State v(12);
  v << x.a, x.s, x.z, x.n, x.aa, x.a_sm, x.a_sp, x.a_sz, x.sp_sm, x.sm_sm, x.sz_sm, x.sz_sz;
  return v;
}

C2State unpack_c2(const ode::State& v) {
  return {v[0], v[1], v[2].real(), v[3].real(), v[4], v[5],
          v[6], v[7], v[8].real(), v[9], v[10], v[11].real()};
}

}  // namespace

MFState mf_rhs(const MFState& x, const ModelParams& p) {
  const double G = p.g_collective;
  const double dephase = 0.5 * p.gamma + 2.0 * p.gamma_phi;
  MFState d{};
  d.a = -(I * p.delta + 0.5 * p.kappa) * x.a - I * G * x.s;
  d.s = -dephase * x.s + I * G * x.a * x.z;
  d.z = (2.0 * I * G * (std::conj(x.a) * x.s - x.a * std::conj(x.s))).real() - p.gamma * (x.z + 1.0);
  if (p.is_htc()) {
    const double lam = std::sqrt(p.huang_rhys) * p.omega_nu;
    d.s -= 2.0 * I * lam * (x.beta + std::conj(x.beta)) * x.s;
    // b thermalization enters through gamma_down - gamma_up = gamma_nu; the
    // Lamb shift couples beta to its conjugate
    d.beta = -(I * p.omega_nu + 0.5 * p.gamma_nu) * x.beta + 0.5 * p.gamma_nu * std::conj(x.beta) -
             I * lam * x.z;
  }
  return d;
}

namespace {

// <XYZ> with the joint cumulant of X, Y, Z set to zero
cplx close3(cplx xy, cplx xz, cplx yz, cplx x, cplx y, cplx z) {
  return xy * z + xz * y + yz * x - 2.0 * x * y * z;
}

}  // namespace

ThirdMoments close_third_moments(const C2State& x) {
  const cplx a = x.a, ac = std::conj(x.a), s = x.s, sc = std::conj(x.s), z = x.z;
  const cplx ad_sz = std::conj(x.a_sz);
  const cplx ad_sm = std::conj(x.a_sp);
  ThirdMoments m;
  m.aa_sz = close3(x.aa, x.a_sz, x.a_sz, a, a, z);
  m.ada_sz = close3(x.n, ad_sz, x.a_sz, ac, a, z);
  m.ada_sm = close3(x.n, ad_sm, x.a_sm, ac, a, s);
  m.aa_sp = close3(x.aa, x.a_sp, x.a_sp, a, a, sc);
  m.ad_sz_sm = close3(ad_sz, ad_sm, x.sz_sm, ac, z, s);
  m.a_sz_sm = close3(x.a_sz, x.a_sm, x.sz_sm, a, z, s);
  m.ad_sm_sm = close3(ad_sm, ad_sm, x.sm_sm, ac, s, s);
  m.a_sp_sm = close3(x.a_sp, x.a_sm, x.sp_sm, a, sc, s);
  m.a_sz_sz = close3(x.a_sz, x.a_sz, x.sz_sz, a, z, z);
  return m;
}

C2State c2_moment_rhs(const C2State& x, const ThirdMoments& m, const ModelParams& p) {
  if (p.is_htc()) {
    throw Error(ErrorCode::HTCNotSupported, "second-order cumulants cover the Tavis-Cummings model only");
  }
  const double G = p.g_collective;
  const double inv_n = 1.0 / p.n_emitters;
  const double pair = 1.0 - inv_n;  // (N - 1) / N from sums over other emitters
  const double dephase = 0.5 * p.gamma + 2.0 * p.gamma_phi;
  const cplx photon = I * p.delta + 0.5 * p.kappa;
  const cplx s = x.s;
  const double z = x.z;

  C2State d{};
  d.a = -photon * x.a - I * G * s;
  d.s = -dephase * s + I * G * x.a_sz;
  d.z = (2.0 * I * G * (std::conj(x.a_sp) - x.a_sp)).real() - p.gamma * (z + 1.0);
  d.n = -p.kappa * x.n + (I * G * (x.a_sp - std::conj(x.a_sp))).real();
  d.aa = -(2.0 * photon) * x.aa - 2.0 * I * G * x.a_sm;
  // same site: sigma^- sigma^- = 0
  d.a_sm = -(photon + dephase) * x.a_sm - I * G * pair * x.sm_sm + I * G * m.aa_sz;
  // same site: sigma^- sigma^+ = (1 - sigma_z)/2; a a^dagger = a^dagger a + 1
  d.a_sp = -(photon + dephase) * x.a_sp - I * G * (0.5 * (1.0 - z) * inv_n + pair * x.sp_sm) -
           I * G * (m.ada_sz + z * inv_n);
  // same site: sigma^- sigma_z = sigma^-; a a^dagger = a^dagger a + 1
  d.a_sz = -(photon + p.gamma) * x.a_sz - p.gamma * x.a - I * G * (s * inv_n + pair * x.sz_sm) +
           2.0 * I * G * (m.ada_sm + s * inv_n) - 2.0 * I * G * m.aa_sp;
  d.sp_sm = -2.0 * dephase * x.sp_sm + 2.0 * G * m.ad_sz_sm.imag();
  d.sm_sm = -2.0 * dephase * x.sm_sm + 2.0 * I * G * m.a_sz_sm;
  d.sz_sm = -(p.gamma + dephase) * x.sz_sm - p.gamma * s + 2.0 * I * G * m.ad_sm_sm -
            2.0 * I * G * m.a_sp_sm + I * G * m.a_sz_sz;
  d.sz_sz = -2.0 * p.gamma * (x.sz_sz + z) - 8.0 * G * m.ad_sz_sm.imag();
  return d;
}

C2State c2_rhs(const C2State& x, const ModelParams& p) {
  return c2_moment_rhs(x, close_third_moments(x), p);
}

MFState mf_initial(const InitialCondition& init) {
  validate(init);
  const SiteDensity rho = single_emitter_density(init.theta);
  return {0.0, rho.sigma_minus(), rho.sigma_z(), 0.0};
}

C2State c2_initial(const InitialCondition& init) {
  const MFState m = mf_initial(init);
  C2State x{};
  x.s = m.s;
  x.z = m.z;
  x.sp_sm = std::norm(m.s);
  x.sm_sm = m.s * m.s;
  x.sz_sm = m.z * m.s;
  x.sz_sz = m.z * m.z;
  return x;
}

double mf_j_squared(const MFState& x, int n_emitters) {
  const double n = n_emitters;
  return 0.25 * n * n * (x.z * x.z + 4.0 * std::norm(x.s));
}

double c2_j_squared(const C2State& x, int n_emitters) {
  const double n = n_emitters;
  return 0.75 * n + 0.25 * n * (n - 1.0) * x.sz_sz + n * (n - 1.0) * x.sp_sm;
}

Trajectory solve(Method method, const ModelParams& params, const InitialCondition& init,
                 const SolveOptions& opts) {
  check_options(opts);
  const ModelParams p = to_rotating_frame(validate(params));
  if (method == Method::C2 && p.is_htc()) {
    throw Error(ErrorCode::HTCNotSupported, "second-order cumulants cover the Tavis-Cummings model only");
  }
  const int n = p.n_emitters;

  std::vector<double> t_int(opts.t_grid_fs.size());
  std::transform(opts.t_grid_fs.begin(), opts.t_grid_fs.end(), t_int.begin(), UnitSystem::fs_to_internal);

  ode::Options ode_opts;
  ode_opts.rtol = opts.rtol;
  ode_opts.atol = opts.atol;
  ode_opts.method = opts.method;

  Trajectory traj;
  traj.times_fs = opts.t_grid_fs;
  const auto record = [&](double photons, cplx s, double z, double j2) {
    traj.photon_per_emitter.push_back(photons);
    traj.coherence.push_back(std::abs(s));
    traj.sz_mean.push_back(z);
    traj.j2.push_back(j2);
  };

  if (method == Method::MF) {
    traj.stats = ode::integrate(
        [&](double, const ode::State& y, ode::State& dy) { dy = pack(mf_rhs(unpack_mf(y), p)); },
        pack(mf_initial(init)), t_int, ode_opts,
        [&](std::size_t, double, const ode::State& y) {
          const MFState x = unpack_mf(y);
          record(std::norm(x.a), x.s, x.z, mf_j_squared(x, n));
        });
  } else {
    traj.stats = ode::integrate(
        [&](double, const ode::State& y, ode::State& dy) { dy = pack(c2_rhs(unpack_c2(y), p)); },
        pack(c2_initial(init)), t_int, ode_opts,
        [&](std::size_t, double, const ode::State& y) {
          const C2State x = unpack_c2(y);
          record(x.n, x.s, x.z, c2_j_squared(x, n));
        });
  }
  return traj;
}

}  // namespace superrad::semiclassical
