#pragma once

// Exact solver over the diagonal excitation blocks nu = 0..N of the
// Tavis-Cummings master equation (see permbasis.hpp and liouville.hpp).

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "superrad/model.hpp"
#include "superrad/ode.hpp"
#include "superrad/permbasis.hpp"

namespace superrad::pibs {

enum class Mode {
  Joint,       // one stacked ODE over all blocks
  Sequential,  // block N first, each block fed by an interpolant of the one above
};

struct SolveOptions {
  std::vector<double> t_grid_fs;
  double rtol = 1e-8;
  double atol = 1e-10;
  Mode mode = Mode::Joint;
  ode::Method method = ode::Method::DormandPrince45;  // joint mode; sequential always uses DP45
  bool interpolate_outputs = true;  // joint DP45: free steps, outputs from the continuous extension
  bool keep_final_state = false;
  std::int64_t max_patterns = 20'000'000;  // C(N+3,3) above this throws DimensionCap
};

struct Trajectory {
  std::vector<double> times_fs;
  std::vector<double> photon_mean;
  std::vector<double> sz_mean;
  std::optional<std::vector<cplx>> coherence;  // not available from diagonal blocks
  std::vector<double> j2;
  std::vector<double> trace_residual;
  std::vector<BlockState> final_state;  // amplitude coordinates, if requested
  ode::Stats stats;
};

/// Throws HTCNotSupported, InvalidParameter (bad grid or tolerances),
/// DimensionCap, ToleranceNotMet, NonfiniteState.
Trajectory solve(const ModelParams& params, const InitialCondition& init, const SolveOptions& opts);

// Observables of block states in amplitude coordinates (BlockState::amps).

/// sum over population patterns of C(N, m_uu) * Re amp; exactly 1 for a density matrix.
double trace(std::span<const BlockState> blocks, int n_emitters);
double photon_number(std::span<const BlockState> blocks, int n_emitters);
double sigma_z_mean(std::span<const BlockState> blocks, int n_emitters);

/// <J^+ J^-> = sum_{i != j} <sigma+_i sigma-_j> + sum_i <sigma+_i sigma-_i>.
double collective_correlator(std::span<const BlockState> blocks, int n_emitters);

/// <J^2> = <J^+ J^-> + <Jz^2> - <Jz>.
double j_squared(std::span<const BlockState> blocks, int n_emitters);

/// Padded storage of all diagonal blocks in multiplicity-weighted coordinates.
/// Block nu holds, for each m_uu = 0..nu, a square (m_du, m_ud) in
/// [0, nu - m_uu]^2 stored row-major, so every neighbour of a pattern sits at a
/// fixed offset. Slots with m_du + m_ud > N - m_uu are padding and stay zero.
class BlockLayout {
 public:
  explicit BlockLayout(int n_emitters);

  int n_emitters() const { return n_emitters_; }
  std::int64_t size() const { return offsets_.back(); }
  std::int64_t offset(int nu) const { return offsets_[static_cast<std::size_t>(nu)]; }
  std::int64_t block_size(int nu) const { return offset(nu + 1) - offset(nu); }
  /// Block-local start of the (m_du, m_ud) square for m_uu.
  static std::int64_t square_base(int nu, int uu);
  /// Block-local position of a member pattern of block nu.
  std::int64_t local_index(int nu, const Pattern& p) const;

  Eigen::VectorXcd pack(std::span<const BlockState> blocks) const;  // amplitude -> padded weighted
  std::vector<BlockState> unpack(const Eigen::VectorXcd& x) const;  // padded weighted -> amplitude
  Eigen::VectorXcd pack_block(int nu, const Eigen::VectorXcd& amps) const;

 private:
  int n_emitters_;
  std::vector<std::int64_t> offsets_;  // size N + 2
};

/// Matrix-free block Liouvillian on a BlockLayout.
class StencilOperator {
 public:
  explicit StencilOperator(const ModelParams& params);

  const BlockLayout& layout() const { return layout_; }

  /// y = L x over the full stack.
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;

  /// y = L0(nu) x (+ L1(nu) source when given); vectors are block-local.
  void apply_block(int nu, const Eigen::VectorXcd& x, const Eigen::VectorXcd* source,
                   Eigen::VectorXcd& y) const;

 private:
  void apply_raw(int nu, const cplx* x, const cplx* src, cplx* y) const;

  ModelParams params_;
  BlockLayout layout_;
  std::vector<double> sqrt_;
};

/// All diagonal blocks stacked nu = 0..N in canonical order and weighted
/// coordinates, assembled from build_L0/build_L1. Reference for StencilOperator.
class AssembledOperator {
 public:
  explicit AssembledOperator(const ModelParams& params);

  std::int64_t rows() const { return matrix_.rows(); }
  std::int64_t nonzeros() const { return matrix_.nonZeros(); }
  std::int64_t offset(int nu) const { return offsets_[static_cast<std::size_t>(nu)]; }
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const { y = matrix_ * x; }

 private:
  std::vector<std::int64_t> offsets_;
  Eigen::SparseMatrix<cplx, Eigen::RowMajor, std::int64_t> matrix_;
};

/// Observable weights over a padded stacked vector.
class StackedObservables {
 public:
  explicit StackedObservables(const BlockLayout& layout);

  struct Values {
    double trace = 0.0;
    double photons = 0.0;
    double sz_mean = 0.0;
    double j2 = 0.0;
  };

  /// x is the full padded vector, or block nu alone when nu >= 0.
  Values evaluate(const Eigen::VectorXcd& x, int nu = -1) const;

 private:
  struct Entry {
    std::int64_t local;  // index within its block
    double photons;      // n = nu - m_uu
    double jz;           // (m_uu - m_dd) / 2
    double up;           // m_uu
  };
  int n_emitters_;
  std::vector<std::int64_t> offsets_;
  std::vector<std::vector<Entry>> populations_;   // per block
  std::vector<std::vector<std::int64_t>> pairs_;  // per block, m_du = m_ud = 1
};

}  // namespace superrad::pibs
