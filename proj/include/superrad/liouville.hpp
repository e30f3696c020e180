#pragma once

// Block operators of the dissipative Tavis-Cummings master equation in the
// permutation basis (see permbasis.hpp):
//
//   d/dt rho^(nu) = L0^(nu) rho^(nu) + L1^(nu) rho^(nu+1).
//
// L0 collects the cavity/emitter commutator, every anticommutator half and
// the dephasing sandwich, all of which conserve (nu, nu'). L1 carries the two
// loss sandwiches a rho a^dagger and sigma^- rho sigma^+ from block nu+1.
// The model has no gain, so no other block couplings exist.
//
// The element tables below are derived term by term; tests compare every
// nonzero against the explicit Liouvillian of the dense solver.

#include <vector>

#include <Eigen/SparseCore>

#include "superrad/model.hpp"
#include "superrad/permbasis.hpp"

namespace superrad {

/// Amplitude: unweighted O_lambda coefficients (BlockState::amps).
/// Weighted: x = multiplicity(lambda) * amp. The weighted operator is
/// D L D^-1 with D = diag(multiplicity) and keeps populations O(1).
enum class Coordinates { Amplitude, Weighted };

using SparseRowMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor, int>;

struct SparseBlockOp {
  int source_nu = 0;
  int target_nu = 0;
  Coordinates coordinates = Coordinates::Amplitude;
  SparseRowMatrix matrix;  // rows: target members, cols: source members

  /// y += matrix * x
  void apply_add(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;
  int max_row_nonzeros() const;
};

struct SiteTransition {
  Pattern pattern;
  int factor = 0;
};

/// Action of the summed single-site map sum_i (|p> -> |q> on site i) on the
/// unweighted permutation sum O_m: returns (m - e_p + e_q, m_q + 1) for
/// p != q, and (m, m_p) for p == q. Throws EmptySourceBin if m_p = 0 and p != q.
SiteTransition single_site_transition(const Pattern& m, SiteUnit p, SiteUnit q);

/// One term of the block Liouvillian expressed as a site-unit rewrite plus a
/// photon-number shift of the source relative to the target.
struct TransitionRule {
  enum class Side { Left, Right, Sandwich };
  Side side = Side::Left;
  SiteUnit from = SiteUnit::uu;
  SiteUnit to = SiteUnit::uu;
  int source_dn_left = 0;   // n_source - n_target
  int source_dn_right = 0;  // n'_source - n'_target
  cplx amplitude{};         // multiplies the coupling or rate
};

/// Coherent coupling rules of L0 (amplitudes multiply g).
const std::vector<TransitionRule>& coupling_rules();

/// Throws HTCNotSupported when params.huang_rhys != 0.
SparseBlockOp build_L0(const ModelParams& params, int nu,
                       Coordinates coords = Coordinates::Amplitude);
SparseBlockOp build_L0(const ModelParams& params, const BlockIndex& block, Coordinates coords);

/// Loss operator from block nu+1 into block nu. Throws NuOutOfRange unless 0 <= nu < N.
SparseBlockOp build_L1(const ModelParams& params, int nu,
                       Coordinates coords = Coordinates::Amplitude);
SparseBlockOp build_L1(const ModelParams& params, const BlockIndex& target,
                       const BlockIndex& source, Coordinates coords);

}  // namespace superrad
