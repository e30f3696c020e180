#include "superrad/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "superrad/error.hpp"

namespace superrad {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::ZeroEmitters: return "ZeroEmitters";
    case ErrorCode::MixedDephasingModels: return "MixedDephasingModels";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::NonpositiveFrequency: return "NonpositiveFrequency";
    case ErrorCode::NonpositiveTemperature: return "NonpositiveTemperature";
    case ErrorCode::InvalidPattern: return "InvalidPattern";
    case ErrorCode::NuOutOfRange: return "NuOutOfRange";
    case ErrorCode::EmptySourceBin: return "EmptySourceBin";
    case ErrorCode::HTCNotSupported: return "HTCNotSupported";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::NonfiniteState: return "NonfiniteState";
    case ErrorCode::DimensionCap: return "DimensionCap";
    case ErrorCode::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::InvalidSweep: return "InvalidSweep";
    case ErrorCode::ConfigMissingKey: return "ConfigMissingKey";
    case ErrorCode::ConfigUnknownKey: return "ConfigUnknownKey";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::InvalidParameter, std::string(name) + " is not finite");
  }
}

void require_rate(double v, const char* name) {
  require_finite(v, name);
  if (v < 0.0) throw Error(ErrorCode::NegativeRate, std::string(name) + " < 0");
}

}  // namespace

ModelParams validate(const ModelParams& params) {
  if (params.n_emitters < 1) {
    throw Error(ErrorCode::ZeroEmitters, "n_emitters must be >= 1");
  }
  require_finite(params.omega0, "omega0");
  require_finite(params.delta, "delta");
  require_finite(params.g_collective, "g_collective");
  if (params.g_collective <= 0.0) {
    throw Error(ErrorCode::InvalidParameter, "g_collective must be > 0");
  }
  require_rate(params.kappa, "kappa");
  require_rate(params.gamma, "gamma");
  require_rate(params.gamma_phi, "gamma_phi");
  require_rate(params.gamma_nu, "gamma_nu");
  require_rate(params.temperature, "temperature");
  require_rate(params.huang_rhys, "huang_rhys");
  require_finite(params.omega_nu, "omega_nu");
  if (params.huang_rhys > 0.0 && params.gamma_phi > 0.0) {
    throw Error(ErrorCode::MixedDephasingModels,
                "huang_rhys and gamma_phi cannot both be nonzero");
  }
  if (params.is_htc() && params.omega_nu <= 0.0) {
    throw Error(ErrorCode::NonpositiveFrequency, "omega_nu must be > 0 when huang_rhys > 0");
  }

  ModelParams out = params;
  out.g = params.g_collective / std::sqrt(static_cast<double>(params.n_emitters));
  return out;
}

ModelParams to_rotating_frame(const ModelParams& params) {
  ModelParams out = params;
  out.omega0 = 0.0;
  return out;
}

void validate(const InitialCondition& init) {
  if (!(init.theta >= 0.0 && init.theta <= std::numbers::pi)) {
    throw Error(ErrorCode::ThetaOutOfRange, "theta must lie in [0, pi]");
  }
}

SiteDensity single_emitter_density(double theta) {
  validate(InitialCondition{theta, false});
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const cplx up{c, 0.0};
  const cplx down{0.0, -s};

  SiteDensity rho;
  rho[SiteUnit::uu] = up * std::conj(up);
  rho[SiteUnit::du] = down * std::conj(up);
  rho[SiteUnit::ud] = up * std::conj(down);
  rho[SiteUnit::dd] = down * std::conj(down);
  return rho;
}

double bose_occupation(double omega_nu, double temperature) {
  if (!(omega_nu > 0.0)) {
    throw Error(ErrorCode::NonpositiveFrequency, "omega_nu must be > 0");
  }
  if (temperature < 0.0 || !std::isfinite(temperature)) {
    throw Error(ErrorCode::NonpositiveTemperature, "temperature must be >= 0");
  }
  if (temperature == 0.0) return 0.0;
  return 1.0 / std::expm1(omega_nu / temperature);
}

ThermalizationRates thermalization_rates(const ModelParams& params) {
  const double nb = bose_occupation(params.omega_nu, params.temperature);
  return {params.gamma_nu * nb, params.gamma_nu * (nb + 1.0)};
}

}  // namespace superrad
