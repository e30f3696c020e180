#pragma once

#include <array>
#include <complex>

namespace superrad {

using cplx = std::complex<double>;

/// Unit conventions: energies and rates in eV with hbar = 1 inside every
/// solver, so internal time is measured in hbar/eV. All external I/O uses fs.
struct UnitSystem {
  static constexpr double hbar_ev_fs = 0.6582119569;

  static constexpr double fs_to_internal(double t_fs) { return t_fs / hbar_ev_fs; }
  static constexpr double internal_to_fs(double t) { return t * hbar_ev_fs; }
};

/// Physical parameters of the (Holstein-)Tavis-Cummings model. All energies
/// and rates are in eV. huang_rhys > 0 selects the Holstein-Tavis-Cummings
/// model; the vibrational fields are ignored otherwise.
struct ModelParams {
  int n_emitters = 1;
  double omega0 = 0.0;        // emitter splitting
  double delta = 0.0;         // cavity detuning omega_c - omega0
  double g_collective = 0.0;  // g * sqrt(N)
  double kappa = 0.0;
  double gamma = 0.0;
  double gamma_phi = 0.0;
  double omega_nu = 0.0;
  double huang_rhys = 0.0;
  double gamma_nu = 0.0;
  double temperature = 0.0;

  /// Single-emitter coupling g = g_collective / sqrt(N); set by validate().
  double g = 0.0;

  double cavity_frequency() const { return omega0 + delta; }
  bool is_htc() const { return huang_rhys > 0.0; }
};

/// Checks every invariant and fills the derived single-emitter coupling.
/// Throws Error{NegativeRate | ZeroEmitters | MixedDephasingModels | InvalidParameter}.
ModelParams validate(const ModelParams& params);

/// Frame rotating at omega0 for both emitters and cavity: omega0 -> 0 and the
/// cavity frequency becomes delta. Every dissipator is invariant under this
/// rotation, so all excitation-conserving observables are unchanged.
ModelParams to_rotating_frame(const ModelParams& params);

struct InitialCondition {
  double theta = 0.0;       // tilt angle in [0, pi]
  bool vib_thermal = true;  // vibrational modes start thermal at params.temperature
};

void validate(const InitialCondition& init);

/// Single-site matrix units |l><r|, named left-then-right:
/// uu = |up><up|, du = |down><up|, ud = |up><down|, dd = |down><down|.
enum class SiteUnit : int { uu = 0, du = 1, ud = 2, dd = 3 };

inline constexpr std::array<SiteUnit, 4> kSiteUnits = {SiteUnit::uu, SiteUnit::du,
                                                       SiteUnit::ud, SiteUnit::dd};

/// Coefficients of a single-emitter density matrix on the four matrix units.
struct SiteDensity {
  std::array<cplx, 4> coeff{};

  cplx operator[](SiteUnit u) const { return coeff[static_cast<int>(u)]; }
  cplx& operator[](SiteUnit u) { return coeff[static_cast<int>(u)]; }

  /// <sigma^+> = Tr(sigma^+ rho) = rho_du.
  cplx sigma_plus() const { return (*this)[SiteUnit::du]; }
  /// <sigma^-> = rho_ud.
  cplx sigma_minus() const { return (*this)[SiteUnit::ud]; }
  double sigma_z() const { return ((*this)[SiteUnit::uu] - (*this)[SiteUnit::dd]).real(); }
};

/// rho_1 = |psi><psi| with |psi> = exp(-i theta sigma_x / 2)|up>
///       = cos(theta/2)|up> - i sin(theta/2)|down>.
/// Phase convention: <sigma^-> = +i sin(theta)/2, <sigma^+> = -i sin(theta)/2.
/// Throws Error{ThetaOutOfRange} outside [0, pi].
SiteDensity single_emitter_density(double theta);

/// Bose-Einstein occupation 1/(exp(omega/T) - 1); T = 0 gives 0.
double bose_occupation(double omega_nu, double temperature);

struct ThermalizationRates {
  double up = 0.0;    // gamma_nu * n_B, jump operator b^dagger
  double down = 0.0;  // gamma_nu * (n_B + 1), jump operator b
};

ThermalizationRates thermalization_rates(const ModelParams& params);

}  // namespace superrad
