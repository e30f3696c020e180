#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <optional>

#include "superrad/dense.hpp"
#include "superrad/error.hpp"
#include "superrad/liouville.hpp"
#include "support.hpp"

using namespace superrad;

namespace {

// Largest deviation between the explicit Liouvillian applied to each basis
// element of every block and the block-operator prediction.
double projection_error(const ModelParams& params) {
  const int n = params.n_emitters;
  const dense::DenseSystem sys(params, {});
  double worst = 0.0;
  for (int nu = 0; nu <= n; ++nu) {
    const BlockIndex block(n, nu);
    const SparseBlockOp l0 = build_L0(params, block, Coordinates::Amplitude);
    SparseBlockOp l1;
    std::optional<BlockIndex> lower;
    if (nu > 0) {
      lower.emplace(n, nu - 1);
      l1 = build_L1(params, *lower, block, Coordinates::Amplitude);
    }
    const Eigen::SparseMatrix<cplx> l0_cols = l0.matrix;
    const Eigen::SparseMatrix<cplx> l1_cols = l1.matrix;
    for (std::size_t s = 0; s < block.size(); ++s) {
      const Eigen::MatrixXcd x = testing::basis_operator(block[s], block.photons_left(s),
                                                         block.photons_right(s), n + 1);
      Eigen::MatrixXcd exact;
      sys.apply(x, exact);
      Eigen::MatrixXcd predicted = Eigen::MatrixXcd::Zero(x.rows(), x.cols());
      for (Eigen::SparseMatrix<cplx>::InnerIterator it(l0_cols, static_cast<Eigen::Index>(s)); it; ++it) {
        const auto t = static_cast<std::size_t>(it.row());
        predicted += it.value() * testing::basis_operator(block[t], block.photons_left(t),
                                                          block.photons_right(t), n + 1);
      }
      if (lower) {
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(l1_cols, static_cast<Eigen::Index>(s)); it; ++it) {
          const auto t = static_cast<std::size_t>(it.row());
          predicted += it.value() * testing::basis_operator((*lower)[t], lower->photons_left(t),
                                                            lower->photons_right(t), n + 1);
        }
      }
      worst = std::max(worst, (exact - predicted).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("single site transition") {
  auto r = single_site_transition({2, 0, 0, 0}, SiteUnit::uu, SiteUnit::du);
  CHECK(r.pattern == Pattern{1, 1, 0, 0});
  CHECK(r.factor == 1);
  r = single_site_transition({1, 1, 0, 0}, SiteUnit::uu, SiteUnit::du);
  CHECK(r.pattern == Pattern{0, 2, 0, 0});
  CHECK(r.factor == 2);
  r = single_site_transition({3, 1, 0, 0}, SiteUnit::uu, SiteUnit::uu);
  CHECK(r.pattern == Pattern{3, 1, 0, 0});
  CHECK(r.factor == 3);
  try {
    single_site_transition({0, 1, 1, 0}, SiteUnit::dd, SiteUnit::uu);
    FAIL("expected EmptySourceBin");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySourceBin);
  }
}

TEST_CASE("single site transition matches explicit three-emitter matrices") {
  // image of O_m under sum_i (unit p -> unit q on site i), built arrangement by arrangement
  const auto arrangement = [](const std::array<SiteUnit, 3>& units) {
    int row = 0, col = 0;
    for (auto u : units) {
      row = 2 * row + ((u == SiteUnit::uu || u == SiteUnit::ud) ? 1 : 0);
      col = 2 * col + ((u == SiteUnit::uu || u == SiteUnit::du) ? 1 : 0);
    }
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(8, 8);
    x(row, col) = 1.0;
    return x;
  };
  for (const auto& m : enumerate_patterns(3)) {
    for (auto p : kSiteUnits) {
      for (auto q : kSiteUnits) {
        if (p == q || m[p] < 1) continue;
        Eigen::MatrixXcd image = Eigen::MatrixXcd::Zero(8, 8);
        for (int code = 0; code < 64; ++code) {
          std::array<SiteUnit, 3> units{};
          Pattern counts;
          for (int k = 0, c = code; k < 3; ++k, c /= 4) {
            units[static_cast<std::size_t>(k)] = static_cast<SiteUnit>(c % 4);
            ++counts[units[static_cast<std::size_t>(k)]];
          }
          if (!(counts == m)) continue;
          for (auto& u : units) {
            if (u != p) continue;
            u = q;
            image += arrangement(units);
            u = p;
          }
        }
        const auto r = single_site_transition(m, p, q);
        const Eigen::MatrixXcd expected = r.factor * testing::basis_operator(r.pattern, 0, 0, 1);
        CHECK((image - expected).cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
}

TEST_CASE("block operators reproduce the explicit Liouvillian") {
  for (int n = 1; n <= 5; ++n) {
    CAPTURE(n);
    CHECK(projection_error(testing::fig2_params(n)) < 1e-12);

    ModelParams other = testing::fig2_params(n);
    other.delta = 0.21;
    other.kappa = 0.05;
    other.gamma = 0.02;
    other.gamma_phi = 0.03;
    other.g_collective = 0.7;
    CHECK(projection_error(validate(other)) < 1e-12);
  }
}

TEST_CASE("trivial operators") {
  ModelParams p;
  p.n_emitters = 3;
  p.g_collective = 1.0;
  p = validate(p);
  p.g = 0.0;
  for (int nu = 0; nu <= 3; ++nu) CHECK(build_L0(p, nu).matrix.nonZeros() == 0);
  for (int nu = 0; nu < 3; ++nu) CHECK(build_L1(p, nu).matrix.nonZeros() == 0);
}

TEST_CASE("dephasing only gives a diagonal L0") {
  ModelParams p;
  p.n_emitters = 2;
  p.g_collective = 1.0;
  p.gamma_phi = 0.0075;
  p = validate(p);
  p.g = 0.0;
  const BlockIndex block(2, 2);
  const auto l0 = build_L0(p, block, Coordinates::Amplitude);
  for (std::size_t i = 0; i < block.size(); ++i) {
    const double expected = -2.0 * 0.0075 * (block[i].ud + block[i].du);
    CHECK(l0.matrix.coeff(static_cast<int>(i), static_cast<int>(i)).real() == doctest::Approx(expected));
  }
}

TEST_CASE("L1 elements") {
  SUBCASE("cavity loss, one emitter") {
    ModelParams p;
    p.n_emitters = 1;
    p.g_collective = 1.0;
    p.kappa = 0.3;
    p = validate(p);
    const BlockIndex lo(1, 0), hi(1, 1);
    const auto l1 = build_L1(p, lo, hi, Coordinates::Amplitude);
    const auto t = lo.find({0, 0, 0, 1});
    const auto s = hi.find({0, 0, 0, 1});
    CHECK(l1.matrix.coeff(static_cast<int>(t), static_cast<int>(s)) == cplx{0.3, 0.0});
    CHECK(l1.matrix.nonZeros() == 1);
  }
  SUBCASE("emitter loss, two emitters") {
    ModelParams p;
    p.n_emitters = 2;
    p.g_collective = 1.0;
    p.gamma = 0.2;
    p = validate(p);
    const BlockIndex lo(2, 1), hi(2, 2);
    const auto l1 = build_L1(p, lo, hi, Coordinates::Amplitude);
    const auto t = lo.find({1, 0, 0, 1});
    const auto s = hi.find({2, 0, 0, 0});
    CHECK(l1.matrix.coeff(static_cast<int>(t), static_cast<int>(s)).real() == doctest::Approx(0.2));
  }
  ModelParams p = testing::fig2_params(3);
  CHECK_THROWS_AS(build_L1(p, 3), Error);
  CHECK_THROWS_AS(build_L1(p, -1), Error);
}

TEST_CASE("weighted coordinates are a diagonal similarity") {
  const ModelParams p = testing::fig2_params(4);
  for (int nu = 0; nu <= 4; ++nu) {
    const BlockIndex block(4, nu);
    const auto amp = build_L0(p, block, Coordinates::Amplitude);
    const auto w = build_L0(p, block, Coordinates::Weighted);
    for (int r = 0; r < w.matrix.outerSize(); ++r) {
      for (SparseRowMatrix::InnerIterator it(w.matrix, r); it; ++it) {
        const double scale = multiplicity(block[static_cast<std::size_t>(r)]) /
                             multiplicity(block[static_cast<std::size_t>(it.col())]);
        CHECK(std::abs(it.value() - scale * amp.matrix.coeff(r, static_cast<int>(it.col()))) < 1e-12);
      }
    }
    if (nu < 4) {
      const BlockIndex hi(4, nu + 1);
      const auto a1 = build_L1(p, block, hi, Coordinates::Amplitude);
      const auto w1 = build_L1(p, block, hi, Coordinates::Weighted);
      for (int r = 0; r < w1.matrix.outerSize(); ++r) {
        for (SparseRowMatrix::InnerIterator it(w1.matrix, r); it; ++it) {
          const double scale = multiplicity(block[static_cast<std::size_t>(r)]) /
                               multiplicity(hi[static_cast<std::size_t>(it.col())]);
          CHECK(std::abs(it.value() - scale * a1.matrix.coeff(r, static_cast<int>(it.col()))) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("sparsity bound") {
  for (int n : {1, 4, 12, 30}) {
    const ModelParams p = testing::fig2_params(n);
    for (int nu : {0, n / 2, n}) {
      const auto l0 = build_L0(p, nu, Coordinates::Weighted);
      int row_max = l0.max_row_nonzeros();
      if (nu < n) row_max += build_L1(p, nu, Coordinates::Weighted).max_row_nonzeros();
      CHECK(row_max <= 12);
    }
  }
}

TEST_CASE("HTC is rejected") {
  ModelParams p = testing::fig2_params(2);
  p.gamma_phi = 0.0;
  p.huang_rhys = 0.1;
  p.omega_nu = 0.15;
  p = validate(p);
  try {
    build_L0(p, 1);
    FAIL("expected HTCNotSupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HTCNotSupported);
  }
}
