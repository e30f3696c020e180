#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "superrad/error.hpp"
#include "superrad/model.hpp"
#include "support.hpp"

using namespace superrad;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidParameter;
}

}  // namespace

TEST_CASE("validate derives the single-emitter coupling") {
  const ModelParams p = testing::fig2_params(10);
  CHECK(p.g == doctest::Approx(0.4 / std::sqrt(10.0)).epsilon(1e-15));

  ModelParams q;
  q.n_emitters = 1;
  q.g_collective = 0.1;
  CHECK(validate(q).g == doctest::Approx(0.1));
}

TEST_CASE("validate rejects invariant violations") {
  ModelParams p;
  p.n_emitters = 2;
  p.g_collective = 0.1;

  ModelParams neg = p;
  neg.kappa = -1e-3;
  CHECK(code_of([&] { validate(neg); }) == ErrorCode::NegativeRate);

  ModelParams zero = p;
  zero.n_emitters = 0;
  CHECK(code_of([&] { validate(zero); }) == ErrorCode::ZeroEmitters);

  ModelParams mixed = p;
  mixed.huang_rhys = 0.1;
  mixed.omega_nu = 0.15;
  mixed.gamma_phi = 0.0075;
  CHECK(code_of([&] { validate(mixed); }) == ErrorCode::MixedDephasingModels);

  ModelParams no_g = p;
  no_g.g_collective = 0.0;
  CHECK(code_of([&] { validate(no_g); }) == ErrorCode::InvalidParameter);

  ModelParams no_freq = p;
  no_freq.huang_rhys = 0.1;
  CHECK(code_of([&] { validate(no_freq); }) == ErrorCode::NonpositiveFrequency);
}

TEST_CASE("rotating frame keeps the detuning") {
  ModelParams p = testing::fig2_params(2);
  p.omega0 = 2.0;
  CHECK(p.cavity_frequency() == doctest::Approx(1.65));
  const ModelParams r = to_rotating_frame(p);
  CHECK(r.omega0 == 0.0);
  CHECK(r.cavity_frequency() == doctest::Approx(-0.35));
}

TEST_CASE("single emitter density") {
  SUBCASE("fully inverted") {
    const SiteDensity rho = single_emitter_density(0.0);
    CHECK(rho[SiteUnit::uu] == cplx{1.0, 0.0});
    CHECK(std::abs(rho[SiteUnit::du]) == 0.0);
    CHECK(std::abs(rho[SiteUnit::dd]) == 0.0);
  }
  SUBCASE("tilted by pi/4") {
    const SiteDensity rho = single_emitter_density(std::numbers::pi / 4);
    CHECK(std::abs(rho.sigma_plus()) == doctest::Approx(std::sin(std::numbers::pi / 4) / 2));
    CHECK(rho.sigma_plus().imag() < 0.0);
    CHECK(rho.sigma_minus() == std::conj(rho.sigma_plus()));
  }
  SUBCASE("equator") {
    const SiteDensity rho = single_emitter_density(std::numbers::pi / 2);
    CHECK(rho[SiteUnit::uu].real() == doctest::Approx(0.5));
    CHECK(rho[SiteUnit::dd].real() == doctest::Approx(0.5));
    CHECK(std::abs(rho[SiteUnit::ud]) == doctest::Approx(0.5));
  }
  SUBCASE("pure, unit trace, sigma_z = cos theta") {
    for (double theta : {0.0, 0.3, 1.0, 2.0, std::numbers::pi}) {
      const SiteDensity rho = single_emitter_density(theta);
      const cplx tr = rho[SiteUnit::uu] + rho[SiteUnit::dd];
      CHECK(std::abs(tr - 1.0) < 1e-15);
      const cplx det = rho[SiteUnit::uu] * rho[SiteUnit::dd] - rho[SiteUnit::ud] * rho[SiteUnit::du];
      CHECK(std::abs(det) < 1e-15);
      CHECK(rho.sigma_z() == doctest::Approx(std::cos(theta)));
    }
  }
  CHECK(code_of([] { single_emitter_density(-0.1); }) == ErrorCode::ThetaOutOfRange);
  CHECK(code_of([] { single_emitter_density(4.0); }) == ErrorCode::ThetaOutOfRange);
}

TEST_CASE("bose occupation and thermalization rates") {
  CHECK(bose_occupation(0.15, 0.026) == doctest::Approx(3.131936652740e-3).epsilon(1e-10));
  CHECK(bose_occupation(0.15, 0.0) == 0.0);
  CHECK(bose_occupation(std::log(2.0), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(code_of([] { bose_occupation(0.0, 0.026); }) == ErrorCode::NonpositiveFrequency);
  CHECK(code_of([] { bose_occupation(0.15, -1.0); }) == ErrorCode::NonpositiveTemperature);

  ModelParams p;
  p.omega_nu = 0.15;
  p.gamma_nu = 0.01;
  for (double t : {0.0, 0.01, 0.026, 0.3}) {
    p.temperature = t;
    const auto r = thermalization_rates(p);
    CHECK(r.down - r.up == doctest::Approx(0.01).epsilon(1e-12));
  }
}

TEST_CASE("unit conversion") {
  CHECK(UnitSystem::hbar_ev_fs == 0.6582119569);
  CHECK(UnitSystem::internal_to_fs(UnitSystem::fs_to_internal(37.5)) == doctest::Approx(37.5));
}
