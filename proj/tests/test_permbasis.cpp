#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <set>
#include <tuple>

#include "superrad/error.hpp"
#include "superrad/permbasis.hpp"

using namespace superrad;

TEST_CASE("pattern counts") {
  CHECK(enumerate_patterns(1).size() == 4);
  CHECK(enumerate_patterns(10).size() == 286);
  CHECK(pattern_count(140) == 477191);
  CHECK(static_cast<std::int64_t>(enumerate_patterns(140).size()) == 477191);
  CHECK_THROWS_AS(enumerate_patterns(0), Error);
}

TEST_CASE("ranking is the enumeration order") {
  for (int n : {1, 2, 6, 13}) {
    const auto patterns = enumerate_patterns(n);
    for (std::size_t k = 0; k < patterns.size(); ++k) {
      REQUIRE(pattern_rank(patterns[k], n) == static_cast<std::int64_t>(k));
      REQUIRE(pattern_unrank(static_cast<std::int64_t>(k), n) == patterns[k]);
    }
    CHECK(patterns.front() == Pattern{0, 0, 0, n});
    CHECK(patterns.back() == Pattern{n, 0, 0, 0});
  }
  try {
    pattern_rank({1, 1, 1, 1}, 5);
    FAIL("expected InvalidPattern");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPattern);
  }
}

TEST_CASE("multiplicity") {
  CHECK(multiplicity({2, 0, 0, 0}) == 1.0);
  CHECK(multiplicity({1, 1, 1, 1}) == 24.0);
  CHECK(multiplicity({3, 0, 2, 0}) == 10.0);
}

TEST_CASE("block members") {
  const BlockIndex b0(2, 0);
  REQUIRE(b0.size() == 1);
  CHECK(b0[0] == Pattern{0, 0, 0, 2});

  CHECK(BlockIndex(2, 2).size() == 10);

  const BlockIndex b1(2, 1);
  const std::set<std::tuple<int, int, int, int>> expected = {
      {0, 0, 0, 2}, {1, 0, 0, 1}, {0, 1, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 1}};
  REQUIRE(b1.size() == expected.size());
  for (const auto& p : b1.members()) CHECK(expected.count({p.uu, p.du, p.ud, p.dd}) == 1);
  for (std::size_t i = 0; i < b1.size(); ++i) {
    CHECK(b1.photons_left(i) >= 0);
    CHECK(b1.photons_right(i) >= 0);
    CHECK(b1.find(b1[i]) == static_cast<std::ptrdiff_t>(i));
  }
  CHECK(b1.find({2, 0, 0, 0}) == -1);
  CHECK_THROWS_AS(BlockIndex(2, 3), Error);
  CHECK_THROWS_AS(block_members(2, -1), Error);
}

TEST_CASE("block sizes rise from 1 to the full pattern count") {
  for (int n : {1, 2, 5, 10, 40}) {
    CHECK(block_size(n, 0) == 1);
    CHECK(block_size(n, n) == pattern_count(n));
    for (int nu = 1; nu <= n; ++nu) CHECK(block_size(n, nu) > block_size(n, nu - 1));
  }
  for (int n : {3, 8}) {
    for (int nu = 0; nu <= n; ++nu) CHECK(static_cast<std::int64_t>(BlockIndex(n, nu).size()) == block_size(n, nu));
  }
}

TEST_CASE("diagonal blocks cover every (lambda, n, n') triple with nu = nu'") {
  for (int n = 1; n <= 8; ++n) {
    // brute force over patterns and photon numbers 0..N (truncation at N+1 levels)
    std::int64_t triples = 0;
    for (const auto& p : enumerate_patterns(n)) {
      for (int nl = 0; nl <= n; ++nl) {
        for (int nr = 0; nr <= n; ++nr) {
          const int nu = nl + p.uu + p.ud;
          const int nup = nr + p.uu + p.du;
          if (nu == nup && nu <= n) ++triples;
        }
      }
    }
    std::int64_t total = 0;
    for (int nu = 0; nu <= n; ++nu) total += block_size(n, nu);
    CHECK(total == triples);
  }
}

TEST_CASE("initial blocks") {
  SUBCASE("inverted state sits in the top block") {
    const auto blocks = initial_blocks(4, 0.0);
    for (const auto& b : blocks) {
      const BlockIndex index(4, b.nu);
      for (std::size_t i = 0; i < index.size(); ++i) {
        const cplx amp = b.amps[static_cast<Eigen::Index>(i)];
        if (b.nu == 4 && index[i] == Pattern{4, 0, 0, 0}) {
          CHECK(amp == cplx{1.0, 0.0});
        } else {
          CHECK(std::abs(amp) == 0.0);
        }
      }
    }
  }
  SUBCASE("ground state sits in block 0") {
    const auto blocks = initial_blocks(3, std::numbers::pi);
    CHECK(std::abs(blocks[0].amps[0] - 1.0) < 1e-15);
    for (int nu = 1; nu <= 3; ++nu) CHECK(blocks[static_cast<std::size_t>(nu)].amps.norm() < 1e-15);
  }
  SUBCASE("single emitter on the equator") {
    const auto blocks = initial_blocks(1, std::numbers::pi / 2);
    CHECK(std::abs(blocks[0].amps[0] - 0.5) < 1e-15);
    const BlockIndex b1(1, 1);
    CHECK(std::abs(blocks[1].amps[b1.find({1, 0, 0, 0})] - 0.5) < 1e-15);
    CHECK(std::abs(blocks[1].amps[b1.find({0, 1, 0, 0})]) == 0.0);
    CHECK(std::abs(blocks[1].amps[b1.find({0, 0, 1, 0})]) == 0.0);
  }
  SUBCASE("unit trace for all angles") {
    for (int n = 1; n <= 8; ++n) {
      for (double theta : {0.0, 0.4, std::numbers::pi / 4, 1.7, std::numbers::pi}) {
        double trace = 0.0;
        for (const auto& b : initial_blocks(n, theta)) {
          const BlockIndex index(n, b.nu);
          for (std::size_t i = 0; i < index.size(); ++i) {
            const Pattern& p = index[i];
            if (p.is_population() && index.photons_left(i) == b.nu - p.uu) {
              trace += binomial(n, p.uu) * b.amps[static_cast<Eigen::Index>(i)].real();
            }
          }
        }
        CHECK(trace == doctest::Approx(1.0).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("weighted coordinates round trip") {
  const BlockIndex b(5, 3);
  Eigen::VectorXcd v = Eigen::VectorXcd::Random(static_cast<Eigen::Index>(b.size()));
  const Eigen::VectorXcd w = to_weighted(b, v);
  CHECK((from_weighted(b, w) - v).norm() < 1e-13);
  const auto k = b.find({1, 1, 1, 2});
  CHECK(std::abs(w[k] - 60.0 * v[k]) < 1e-12);
}
