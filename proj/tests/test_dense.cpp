#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "superrad/dense.hpp"
#include "superrad/error.hpp"
#include "support.hpp"

using namespace superrad;

namespace {

ModelParams bare(int n, double g_collective = 0.1) {
  ModelParams p;
  p.n_emitters = n;
  p.g_collective = g_collective;
  return validate(p);
}

ModelParams htc_params(int n, double s) {
  ModelParams p;
  p.n_emitters = n;
  p.g_collective = 0.2;
  p.kappa = 0.01;
  p.gamma = 1e-3;
  p.omega_nu = 0.15;
  p.huang_rhys = s;
  p.gamma_nu = 0.01;
  p.temperature = 0.026;
  return validate(p);
}

}  // namespace

TEST_CASE("zero superoperator without couplings") {
  ModelParams p = bare(1);
  p.g = 0.0;
  const auto l = dense::build_liouvillian(p, {});
  CHECK(l.norm() == 0.0);
}

TEST_CASE("superoperator is trace preserving and matches the matrix form") {
  const ModelParams p = testing::fig2_params(2);
  const dense::DenseSystem sys(p, {});
  const auto l = sys.liouvillian();
  const auto d = sys.dimension();
  for (std::int64_t col = 0; col < l.cols(); ++col) {
    cplx trace{};
    for (dense::SparseMatrix::InnerIterator it(l, col); it; ++it) {
      if (it.row() % d == it.row() / d) trace += it.value();
    }
    CHECK(std::abs(trace) < 1e-14);
  }
  const Eigen::MatrixXcd rho = Eigen::MatrixXcd::Random(d, d);
  Eigen::MatrixXcd out;
  sys.apply(rho, out);
  const Eigen::VectorXcd vec = Eigen::Map<const Eigen::VectorXcd>(rho.data(), d * d);
  const Eigen::VectorXcd via_super = l * vec;
  CHECK((via_super - Eigen::Map<const Eigen::VectorXcd>(out.data(), d * d)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("single-excitation Jaynes-Cummings oscillation") {
  const ModelParams p = bare(1, 0.1);
  const auto grid = testing::linspace(0.0, 50.0, 101);
  const auto traj = dense::evolve(p, {}, {0.0, false}, grid);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = UnitSystem::fs_to_internal(grid[k]);
    worst = std::max(worst, std::abs(traj.photon_mean[k] - std::pow(std::sin(0.1 * t), 2)));
  }
  CHECK(worst < 1e-9);
  CHECK(traj.warnings.empty());
}

TEST_CASE("spontaneous emitter decay") {
  ModelParams p = bare(1);
  p.gamma = 0.02;
  p.g = 0.0;
  const auto grid = testing::linspace(0.0, 100.0, 21);
  const auto traj = dense::evolve(p, {}, {0.0, false}, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = UnitSystem::fs_to_internal(grid[k]);
    CHECK(traj.sz_mean[k] == doctest::Approx(2.0 * std::exp(-0.02 * t) - 1.0).epsilon(1e-10));
  }
}

TEST_CASE("conservation and monitoring") {
  for (int n = 1; n <= 3; ++n) {
    const ModelParams p = testing::fig2_params(n);
    const auto grid = testing::linspace(0.0, 100.0, 51);
    const auto traj = dense::evolve(p, {}, {std::numbers::pi / 4, false}, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(traj.trace_residual[k] < 1e-10);
      CHECK(traj.hermiticity_residual[k] < 1e-12);
      CHECK(traj.min_eigenvalue[k] > -1e-8);
    }
    CHECK(std::abs(traj.sigma_plus[0]) == doctest::Approx(std::sin(std::numbers::pi / 4) / 2));
    CHECK(traj.j2[0] == doctest::Approx(traj.j2[0]));
  }
  SUBCASE("closed system keeps the excitation number") {
    const ModelParams p = bare(3, 0.4);
    const auto grid = testing::linspace(0.0, 60.0, 31);
    const auto traj = dense::evolve(p, {}, {0.7, false}, grid);
    const double e0 = traj.photon_mean[0] + 3 * (traj.sz_mean[0] + 1) / 2;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(std::abs(traj.photon_mean[k] + 3 * (traj.sz_mean[k] + 1) / 2 - e0) < 1e-9);
    }
  }
  SUBCASE("symmetric states carry the maximal collective spin") {
    for (double theta : {0.0, std::numbers::pi}) {
      const std::vector<double> grid = {0.0, 1.0};
      const auto traj = dense::evolve(bare(4), {}, {theta, false}, grid);
      CHECK(traj.j2[0] == doctest::Approx(2.0 * 3.0));
    }
  }
}

TEST_CASE("lab and rotating frames agree") {
  ModelParams lab = testing::fig2_params(2);
  lab.omega0 = 2.0;
  const ModelParams rot = to_rotating_frame(lab);
  const auto grid = testing::linspace(0.0, 20.0, 41);
  const auto a = dense::evolve(lab, {}, {std::numbers::pi / 4, false}, grid);
  const auto b = dense::evolve(rot, {}, {std::numbers::pi / 4, false}, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(std::abs(a.photon_mean[k] - b.photon_mean[k]) < 1e-10);
  }
}

TEST_CASE("vibrational thermalization fixed point") {
  ModelParams p = htc_params(1, 0.0);
  p.g = 0.0;
  dense::DenseConfig cfg;
  cfg.model = dense::Model::HTC;
  cfg.n_photon_levels = 2;
  const auto grid = testing::linspace(0.0, 4000.0, 41);
  const auto traj = dense::evolve(p, cfg, {0.0, false}, grid);
  const double nb = bose_occupation(0.15, 0.026);
  // the Lamb-shift squeezing term shifts the fixed point above n_B
  const double r = 0.01 * 0.01 / (0.01 * 0.01 + 4 * 0.15 * 0.15);
  const double fixed = (nb + r / 2) / (1 - r);
  CHECK(traj.b_occupation.back() == doctest::Approx(fixed).epsilon(1e-4));
  CHECK(std::abs(traj.b_occupation.back() - nb) > 5e-4);
}

TEST_CASE("HTC evolution is physical and converged in the vibrational cutoff") {
  const ModelParams p = htc_params(1, 0.2);
  dense::DenseConfig cfg;
  cfg.model = dense::Model::HTC;
  cfg.n_photon_levels = 2;
  const auto grid = testing::linspace(0.0, 100.0, 21);
  const auto traj = dense::evolve(p, cfg, {std::numbers::pi / 4, true}, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(traj.trace_residual[k] < 1e-10);
    CHECK(traj.min_eigenvalue[k] > -1e-8);
  }
  CHECK(traj.b_occupation[0] == doctest::Approx(bose_occupation(0.15, 0.026)).epsilon(1e-3));
  // the displaced vibrational state is not resolved by the default cutoff
  CHECK(dense::vib_truncation_shift(p, cfg, {std::numbers::pi / 4, true}, grid) > 1e-3);
  cfg.n_vib_levels = 15;
  CHECK(dense::vib_truncation_shift(p, cfg, {std::numbers::pi / 4, true}, grid) < 1e-6);
}

TEST_CASE("dimension cap") {
  try {
    dense::DenseSystem(testing::fig2_params(12), {});
    FAIL("expected DimensionCap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionCap);
  }
}
