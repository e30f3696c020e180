#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "superrad/error.hpp"
#include "superrad/ode.hpp"
#include "support.hpp"

using namespace superrad;

namespace {

const ode::Method kMethods[] = {ode::Method::DormandPrince45, ode::Method::DormandPrince853};

}  // namespace

TEST_CASE("complex exponential") {
  const cplx lambda{-0.3, 2.0};
  const ode::RhsFn rhs = [&](double, const ode::State& y, ode::State& dy) { dy = lambda * y; };
  const auto grid = testing::linspace(0.0, 5.0, 11);
  for (auto method : kMethods) {
    ode::Options opts;
    opts.method = method;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    double worst = 0.0;
    std::vector<double> seen;
    ode::State y0(1);
    y0[0] = 1.0;
    const auto stats = ode::integrate(rhs, y0, grid, opts, [&](std::size_t, double t, const ode::State& y) {
      seen.push_back(t);
      worst = std::max(worst, std::abs(y[0] - std::exp(lambda * t)));
    });
    CHECK(worst < 1e-8);
    CHECK(seen == grid);
    CHECK(stats.accepted > 0);
  }
}

TEST_CASE("continuous extension between free steps") {
  const cplx lambda{-0.3, 2.0};
  const ode::RhsFn rhs = [&](double, const ode::State& y, ode::State& dy) { dy = lambda * y; };
  const auto grid = testing::linspace(0.0, 5.0, 401);
  ode::State y0(1);
  y0[0] = 1.0;
  ode::Options opts;
  opts.method = ode::Method::DormandPrince45;
  opts.rtol = 1e-10;
  opts.atol = 1e-12;
  opts.dense_output = true;
  double worst = 0.0;
  std::vector<double> seen;
  ode::State last;
  const auto stats = ode::integrate(rhs, y0, grid, opts, [&](std::size_t, double t, const ode::State& y) {
    seen.push_back(t);
    worst = std::max(worst, std::abs(y[0] - std::exp(lambda * t)));
    last = y;
  });
  CHECK(seen == grid);
  CHECK(worst < 1e-8);
  opts.dense_output = false;
  const auto landed = ode::integrate(rhs, y0, grid, opts, [](std::size_t, double, const ode::State&) {});
  CHECK(landed.accepted >= 400);
  CHECK(stats.accepted * 4 < landed.accepted * 3);
  CHECK(std::abs(last[0] - std::exp(lambda * 5.0)) < 1e-9);
}

TEST_CASE("harmonic oscillator keeps its energy") {
  const ode::RhsFn rhs = [](double, const ode::State& y, ode::State& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  ode::State y0(2);
  y0 << 1.0, 0.0;
  const std::vector<double> grid = {0.0, 100.0};
  ode::Options opts;
  opts.rtol = 1e-11;
  opts.atol = 1e-13;
  ode::State last;
  ode::integrate(rhs, y0, grid, opts, [&](std::size_t, double, const ode::State& y) { last = y; });
  CHECK(std::abs(last[0] - std::cos(100.0)) < 1e-8);
  CHECK(std::abs(last[1] + std::sin(100.0)) < 1e-8);
}

TEST_CASE("step callback and hermite track") {
  const ode::RhsFn rhs = [](double t, const ode::State&, ode::State& dy) { dy[0] = std::cos(t); };
  ode::State y0 = ode::State::Zero(1);
  ode::HermiteTrack track;
  const std::vector<double> grid = {0.0, 3.0};
  ode::Options opts;
  opts.rtol = 1e-10;
  opts.max_step = 0.1;
  ode::integrate(rhs, y0, grid, opts, [](std::size_t, double, const ode::State&) {},
                 [&](double t, const ode::State& y, const ode::State& dy) { track.push(t, y, dy); });
  REQUIRE(track.knots() >= 2);
  CHECK(track.front_time() == 0.0);
  CHECK(track.back_time() == 3.0);
  ode::State out;
  double worst = 0.0;
  for (double t : testing::linspace(0.0, 3.0, 97)) {
    track.evaluate(t, out);
    worst = std::max(worst, std::abs(out[0] - std::sin(t)));
  }
  // cubic Hermite bound h^4/384 max|y''''|
  CHECK(worst <= 1.01 * std::pow(0.1, 4) / 384.0);
}

TEST_CASE("failures are reported") {
  const std::vector<double> grid = {0.0, 1.0};
  SUBCASE("blow-up") {
    const ode::RhsFn rhs = [](double, const ode::State& y, ode::State& dy) { dy = y.cwiseProduct(y); };
    ode::State y0(1);
    y0[0] = 10.0;
    try {
      ode::integrate(rhs, y0, grid, {}, [](std::size_t, double, const ode::State&) {});
      FAIL("expected failure");
    } catch (const Error& e) {
      CHECK((e.code() == ErrorCode::ToleranceNotMet || e.code() == ErrorCode::NonfiniteState));
    }
  }
  SUBCASE("step budget") {
    const ode::RhsFn rhs = [](double, const ode::State& y, ode::State& dy) { dy = cplx{0.0, 50.0} * y; };
    ode::Options opts;
    opts.max_steps = 3;
    ode::State y0(1);
    y0[0] = 1.0;
    try {
      ode::integrate(rhs, y0, grid, opts, [](std::size_t, double, const ode::State&) {});
      FAIL("expected failure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ToleranceNotMet);
    }
  }
  SUBCASE("nonfinite start") {
    const ode::RhsFn rhs = [](double, const ode::State& y, ode::State& dy) { dy = y; };
    ode::State y0(1);
    y0[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(ode::integrate(rhs, y0, grid, {}, [](std::size_t, double, const ode::State&) {}), Error);
  }
}

TEST_CASE("error norm") {
  ode::State v(2), y(2), z(2);
  v << 1e-6, 0.0;
  y << 1.0, 0.0;
  z << 1.0, 0.0;
  const double expected = std::sqrt(0.5 * std::pow(1e-6 / (1e-10 + 1e-8), 2));
  CHECK(ode::error_norm(v, y, z, 1e-8, 1e-10) == doctest::Approx(expected));
}
