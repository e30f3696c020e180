#include "superrad/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "superrad/error.hpp"

namespace superrad {

void SparseBlockOp::apply_add(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  y.noalias() += matrix * x;
}

int SparseBlockOp::max_row_nonzeros() const {
  int best = 0;
  for (int r = 0; r < matrix.outerSize(); ++r) {
    best = std::max(best, static_cast<int>(matrix.outerIndexPtr()[r + 1] - matrix.outerIndexPtr()[r]));
  }
  return best;
}

SiteTransition single_site_transition(const Pattern& m, SiteUnit p, SiteUnit q) {
  if (p == q) return {m, m[p]};
  if (m[p] < 1) throw Error(ErrorCode::EmptySourceBin, "no site of the source type");
  Pattern out = m;
  --out[p];
  ++out[q];
  return {out, out[q]};
}

const std::vector<TransitionRule>& coupling_rules() {
  using S = TransitionRule::Side;
  using U = SiteUnit;
  const cplx mi{0.0, -1.0};
  const cplx pi{0.0, 1.0};
  // -i g (a sigma^+ + a^dagger sigma^-) rho  and  +i g rho (a sigma^+ + a^dagger sigma^-)
  static const std::vector<TransitionRule> rules = {
      {S::Left, U::du, U::uu, +1, 0, mi},   // sigma^+ a, left
      {S::Left, U::dd, U::ud, +1, 0, mi},
      {S::Left, U::uu, U::du, -1, 0, mi},   // sigma^- a^dagger, left
      {S::Left, U::ud, U::dd, -1, 0, mi},
      {S::Right, U::uu, U::ud, 0, -1, pi},  // rho a sigma^+
      {S::Right, U::du, U::dd, 0, -1, pi},
      {S::Right, U::ud, U::uu, 0, +1, pi},  // rho a^dagger sigma^-
      {S::Right, U::dd, U::du, 0, +1, pi},
  };
  return rules;
}

namespace {

using Triplet = Eigen::Triplet<cplx, int>;

// Combinatorial factor of a p -> q rewrite landing on target t from source s.
double site_factor(const Pattern& target, const Pattern& source, SiteUnit p, SiteUnit q,
                   Coordinates coords) {
  return coords == Coordinates::Amplitude ? target[q] : source[p];
}

void require_tc(const ModelParams& params) {
  if (params.huang_rhys != 0.0) {
    throw Error(ErrorCode::HTCNotSupported, "block operators cover the Tavis-Cummings model only");
  }
}

}  // namespace

SparseBlockOp build_L0(const ModelParams& params, int nu, Coordinates coords) {
  return build_L0(params, BlockIndex(params.n_emitters, nu), coords);
}

SparseBlockOp build_L0(const ModelParams& params, const BlockIndex& block, Coordinates coords) {
  require_tc(params);
  const auto size = static_cast<int>(block.size());
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(size) * 9);
  const cplx i{0.0, 1.0};

  for (int r = 0; r < size; ++r) {
    const Pattern& t = block[static_cast<std::size_t>(r)];
    const int n = block.photons_left(static_cast<std::size_t>(r));
    const int np = block.photons_right(static_cast<std::size_t>(r));

    const cplx diag = -i * params.delta * static_cast<double>(n - np) -
                      0.5 * params.kappa * static_cast<double>(n + np) -
                      0.5 * params.gamma * static_cast<double>(2 * t.uu + t.ud + t.du) -
                      2.0 * params.gamma_phi * static_cast<double>(t.ud + t.du);
    if (diag != cplx{}) triplets.emplace_back(r, r, diag);

    if (params.g == 0.0) continue;
    for (const auto& rule : coupling_rules()) {
      if (t[rule.to] < 1) continue;
      Pattern s = t;
      --s[rule.to];
      ++s[rule.from];
      const int ns = n + rule.source_dn_left;
      const int nps = np + rule.source_dn_right;
      if (ns < 0 || nps < 0) continue;
      const auto c = block.find(s);
      if (c < 0) continue;
      const int shifted = rule.side == TransitionRule::Side::Left ? std::max(n, ns) : std::max(np, nps);
      const double value = params.g * std::sqrt(static_cast<double>(shifted)) *
                           site_factor(t, s, rule.from, rule.to, coords);
      triplets.emplace_back(r, static_cast<int>(c), rule.amplitude * value);
    }
  }

  SparseBlockOp op;
  op.source_nu = block.nu();
  op.target_nu = block.nu();
  op.coordinates = coords;
  op.matrix.resize(size, size);
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

SparseBlockOp build_L1(const ModelParams& params, int nu, Coordinates coords) {
  if (nu < 0 || nu >= params.n_emitters) {
    throw Error(ErrorCode::NuOutOfRange, "L1 needs 0 <= nu < N, got nu = " + std::to_string(nu));
  }
  return build_L1(params, BlockIndex(params.n_emitters, nu), BlockIndex(params.n_emitters, nu + 1),
                  coords);
}

SparseBlockOp build_L1(const ModelParams& params, const BlockIndex& target,
                       const BlockIndex& source, Coordinates coords) {
  require_tc(params);
  if (source.nu() != target.nu() + 1) {
    throw Error(ErrorCode::NuOutOfRange, "L1 source block must be target block + 1");
  }
  const auto rows = static_cast<int>(target.size());
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(rows) * 2);

  for (int r = 0; r < rows; ++r) {
    const Pattern& t = target[static_cast<std::size_t>(r)];
    const int n = target.photons_left(static_cast<std::size_t>(r));
    const int np = target.photons_right(static_cast<std::size_t>(r));

    // kappa a rho a^dagger: same pattern, one more photon on both sides
    if (params.kappa != 0.0) {
      const auto c = source.find(t);
      if (c >= 0) {
        const double value = params.kappa * std::sqrt(static_cast<double>(n + 1) * (np + 1));
        triplets.emplace_back(r, static_cast<int>(c), cplx{value, 0.0});
      }
    }
    // gamma sigma^- rho sigma^+: one site uu -> dd, photons unchanged
    if (params.gamma != 0.0 && t.dd >= 1) {
      Pattern s = t;
      --s.dd;
      ++s.uu;
      const auto c = source.find(s);
      if (c >= 0) {
        const double value = params.gamma * site_factor(t, s, SiteUnit::uu, SiteUnit::dd, coords);
        triplets.emplace_back(r, static_cast<int>(c), cplx{value, 0.0});
      }
    }
  }

  SparseBlockOp op;
  op.source_nu = source.nu();
  op.target_nu = target.nu();
  op.coordinates = coords;
  op.matrix.resize(rows, static_cast<int>(source.size()));
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

}  // namespace superrad
