#pragma once

// Permutation-symmetric basis of N two-level emitters.
//
// A density matrix is expanded as
//   rho = sum_{lambda,n,n'} amp(lambda,n,n') |n><n'| (x) O_lambda,
// where O_lambda is the *unweighted* sum of every distinct arrangement of
// m_uu, m_du, m_ud, m_dd single-site matrix units over the N sites (see
// SiteUnit). A product state rho_1^{(x)N} therefore has amplitude
// prod_p (rho_1)_p^{m_p} with no multinomial prefactor, and Tr O_lambda equals
// C(N, m_uu) when m_du = m_ud = 0 (zero otherwise).
//
// Patterns are ordered lexicographically by (m_uu, m_du, m_ud) ascending with
// m_dd implied, so (0,0,0,N) has rank 0 and (N,0,0,0) has rank C(N+3,3) - 1.
//
// Excitation blocks: a basis element has left/right excitation numbers
//   nu  = n  + m_uu + m_ud,
//   nu' = n' + m_uu + m_du.
// Only the diagonal blocks nu = nu' are represented. Blocks with a fixed
// nu - nu' evolve autonomously under the U(1)-invariant master equation, so
// dropping every off-diagonal block is exact for any observable that
// conserves excitation number (photon number, sigma_z, J^2). It is not exact
// for <sigma^+> or <a>, which live in the nu - nu' = +-1 blocks.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "superrad/model.hpp"

namespace superrad {

struct Pattern {
  int uu = 0;
  int du = 0;
  int ud = 0;
  int dd = 0;

  int operator[](SiteUnit u) const;
  int& operator[](SiteUnit u);
  int total() const { return uu + du + ud + dd; }
  bool is_population() const { return du == 0 && ud == 0; }

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// C(N+3, 3): number of weak compositions of N into four parts.
std::int64_t pattern_count(int n_emitters);

/// All patterns of N emitters in canonical order. Throws ZeroEmitters.
std::vector<Pattern> enumerate_patterns(int n_emitters);

/// O(1) combinatorial rank within enumerate_patterns(N). Throws InvalidPattern.
std::int64_t pattern_rank(const Pattern& p, int n_emitters);
Pattern pattern_unrank(std::int64_t rank, int n_emitters);

/// Number of distinct arrangements N! / (m_uu! m_du! m_ud! m_dd!).
double multiplicity(const Pattern& p);

double binomial(int n, int k);

/// Members of the diagonal excitation block nu, in canonical pattern order.
class BlockIndex {
 public:
  BlockIndex(int n_emitters, int nu);

  int n_emitters() const { return n_emitters_; }
  int nu() const { return nu_; }
  std::size_t size() const { return members_.size(); }
  const std::vector<Pattern>& members() const { return members_; }
  const Pattern& operator[](std::size_t i) const { return members_[i]; }

  int photons_left(std::size_t i) const;
  int photons_right(std::size_t i) const;

  /// Position of p in this block, or -1 if p is not a member.
  std::ptrdiff_t find(const Pattern& p) const;

 private:
  int n_emitters_;
  int nu_;
  std::vector<Pattern> members_;
  std::vector<std::int64_t> ranks_;
};

/// Throws NuOutOfRange unless 0 <= nu <= N.
BlockIndex block_members(int n_emitters, int nu);

/// Number of members of block nu, computed without enumerating the block.
std::int64_t block_size(int n_emitters, int nu);

struct BlockState {
  int nu = 0;
  Eigen::VectorXcd amps;
};

/// Diagonal-block projection of |0><0| (x) rho_1(theta)^{(x)N}, blocks nu = 0..N.
std::vector<BlockState> initial_blocks(int n_emitters, double theta);

/// Convert between unweighted amplitudes and multiplicity-weighted
/// coordinates x = multiplicity(lambda) * amp.
Eigen::VectorXcd to_weighted(const BlockIndex& block, const Eigen::VectorXcd& amps);
Eigen::VectorXcd from_weighted(const BlockIndex& block, const Eigen::VectorXcd& weighted);

}  // namespace superrad
