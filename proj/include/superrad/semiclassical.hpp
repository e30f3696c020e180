#pragma once

// Mean-field and second-order cumulant equations for N identical emitters.
// Photon moments are scaled by powers of sqrt(N) so the equations stay O(1)
// at large N: a = <a>/sqrt(N), n = <a^dagger a>/N, aa = <a a>/N and every
// mixed photon-emitter moment carries 1/sqrt(N). Emitter pair moments refer
// to two distinct emitters. All equations are written in the rotating frame.

#include <vector>

#include "superrad/model.hpp"
#include "superrad/ode.hpp"

namespace superrad::semiclassical {

enum class Method { MF, C2 };

struct MFState {
  cplx a;     // <a> / sqrt(N)
  cplx s;     // <sigma^->
  double z;   // <sigma_z>
  cplx beta;  // <b>, HTC only
};

struct C2State {
  cplx a;          // <a> / sqrt(N)
  cplx s;          // <sigma^->
  double z;        // <sigma_z>
  double n;        // <a^dagger a> / N
  cplx aa;         // <a a> / N
  cplx a_sm;       // <a sigma^-> / sqrt(N)
  cplx a_sp;       // <a sigma^+> / sqrt(N)
  cplx a_sz;       // <a sigma_z> / sqrt(N)
  double sp_sm;    // <sigma^+_1 sigma^-_2>
  cplx sm_sm;      // <sigma^-_1 sigma^-_2>
  cplx sz_sm;      // <sigma_z1 sigma^-_2>
  double sz_sz;    // <sigma_z1 sigma_z2>
};

/// Third-order moments entering the second-order equations, scaled like
/// C2State (1/sqrt(N) per photon operator). Site indices are distinct.
struct ThirdMoments {
  cplx aa_sz;     // <a a sigma_z>
  cplx ada_sz;    // <a^dagger a sigma_z>
  cplx ada_sm;    // <a^dagger a sigma^->
  cplx aa_sp;     // <a a sigma^+>
  cplx ad_sz_sm;  // <a^dagger sigma_z1 sigma^-_2>
  cplx a_sz_sm;   // <a sigma_z1 sigma^-_2>
  cplx ad_sm_sm;  // <a^dagger sigma^-_1 sigma^-_2>
  cplx a_sp_sm;   // <a sigma^+_1 sigma^-_2>
  cplx a_sz_sz;   // <a sigma_z1 sigma_z2>
};

/// Third moments with every third-order cumulant set to zero.
ThirdMoments close_third_moments(const C2State& x);

/// Exact Heisenberg equations of the C2State moments for a permutation-symmetric
/// state, given its third moments. Throws HTCNotSupported.
C2State c2_moment_rhs(const C2State& x, const ThirdMoments& m, const ModelParams& params);

/// Time derivative of the mean-field state; Tavis-Cummings when huang_rhys = 0.
MFState mf_rhs(const MFState& x, const ModelParams& params);

/// c2_moment_rhs closed by close_third_moments. Throws HTCNotSupported.
C2State c2_rhs(const C2State& x, const ModelParams& params);

/// Product initial state: vacuum, every emitter in single_emitter_density(theta), <b> = 0.
MFState mf_initial(const InitialCondition& init);
C2State c2_initial(const InitialCondition& init);

/// (N^2/4)(z^2 + 4|s|^2)
double mf_j_squared(const MFState& x, int n_emitters);
/// 3N/4 + N(N-1)/4 <sz sz> + N(N-1) Re <s+ s->
double c2_j_squared(const C2State& x, int n_emitters);

struct SolveOptions {
  std::vector<double> t_grid_fs;
  double rtol = 1e-10;
  double atol = 1e-12;
  ode::Method method = ode::Method::DormandPrince853;
};

struct Trajectory {
  std::vector<double> times_fs;
  std::vector<double> photon_per_emitter;  // <n>/N
  std::vector<double> coherence;           // |<sigma^+>|
  std::vector<double> sz_mean;
  std::vector<double> j2;
  ode::Stats stats;
};

/// Throws HTCNotSupported (C2 with huang_rhys > 0), InvalidParameter (bad grid
/// or tolerances), ToleranceNotMet, NonfiniteState.
Trajectory solve(Method method, const ModelParams& params, const InitialCondition& init,
                 const SolveOptions& opts);

}  // namespace superrad::semiclassical
