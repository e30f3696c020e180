#pragma once

// Brute-force reference solver on the explicit Hilbert space
//   photon (x) [emitter (x) vibration]^(x)N
// with emitter index 0 = down, 1 = up. Intended for small N only; every other
// solver is validated against it.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "superrad/model.hpp"
#include "superrad/ode.hpp"

namespace superrad::dense {

enum class Model { TC, HTC };

struct DenseConfig {
  int n_photon_levels = 0;  // 0 selects N + 1, exact for the TC model
  int n_vib_levels = 5;     // HTC only
  Model model = Model::TC;
  std::int64_t dimension_cap = 20000;
};

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor, std::int64_t>;

/// Hamiltonian, jump operators and observables on the explicit Hilbert space.
/// The frame is set by params.omega0 (0 = frame rotating at omega0).
class DenseSystem {
 public:
  /// Throws DimensionCap when the Hilbert dimension exceeds cfg.dimension_cap.
  DenseSystem(const ModelParams& params, const DenseConfig& cfg);

  std::int64_t dimension() const { return dim_; }
  int photon_levels() const { return photon_levels_; }
  int vib_levels() const { return vib_levels_; }

  /// out = L(rho) for the full master equation.
  void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;

  /// Column-stacked superoperator: vec(L(rho)) = L vec(rho).
  SparseMatrix liouvillian() const;

  /// |0><0| (x) [rho_1(theta) (x) rho_vib]^(x)N.
  Eigen::MatrixXcd initial_state(const InitialCondition& init) const;

  const SparseMatrix& hamiltonian() const { return hamiltonian_; }
  const SparseMatrix& photon_number() const { return n_op_; }
  const SparseMatrix& sigma_plus_sum() const { return sp_op_; }
  const SparseMatrix& sigma_z_sum() const { return sz_op_; }
  const SparseMatrix& j_squared() const { return j2_op_; }
  const SparseMatrix& b_sum() const { return b_op_; }
  const SparseMatrix& b_occupation_sum() const { return nb_op_; }

  /// Local operator acting on tensor factor `factor` (0 = photon,
  /// 1 + 2k = emitter k, 2 + 2k = vibration k for HTC; 1 + k = emitter k for TC).
  SparseMatrix embed(const SparseMatrix& local, int factor) const;
  int emitter_factor(int k) const;

 private:
  struct Jump {
    double rate;
    SparseMatrix op;
    SparseMatrix op_dag;
  };

  ModelParams params_;
  Model model_;
  int photon_levels_ = 0;
  int vib_levels_ = 1;
  std::int64_t dim_ = 0;
  std::vector<int> dims_;
  SparseMatrix hamiltonian_;
  SparseMatrix h_eff_;  // H - (i/2) sum r c^dagger c
  SparseMatrix h_eff_dag_;
  std::vector<Jump> jumps_;
  SparseMatrix n_op_, sp_op_, sz_op_, j2_op_, b_op_, nb_op_;
};

/// Throws DimensionCap.
SparseMatrix build_liouvillian(const ModelParams& params, const DenseConfig& cfg);

/// Tr(op rho).
cplx expectation(const SparseMatrix& op, const Eigen::MatrixXcd& rho);

struct Trajectory {
  std::vector<double> times_fs;
  std::vector<double> photon_mean;
  std::vector<cplx> sigma_plus;  // per-emitter mean
  std::vector<double> sz_mean;
  std::vector<double> j2;
  std::vector<cplx> b_mean;          // per-site mean, HTC only
  std::vector<double> b_occupation;  // per-site mean, HTC only
  std::vector<double> trace_residual;
  std::vector<double> hermiticity_residual;
  std::vector<double> min_eigenvalue;  // empty unless monitored
  std::vector<std::string> warnings;
};

struct EvolveOptions {
  ode::Options ode{1e-10, 1e-12, ode::Method::DormandPrince853};
  /// Minimum eigenvalue monitoring up to this dimension (eigendecomposition per output).
  std::int64_t positivity_dimension = 512;
  double positivity_tolerance = 1e-8;
  /// Integrate with the assembled superoperator up to this dimension, else matrix-free.
  std::int64_t superoperator_dimension = 1024;
};

/// Throws DimensionCap, NonfiniteState, ToleranceNotMet. A positivity
/// violation is recorded in Trajectory::warnings.
Trajectory evolve(const ModelParams& params, const DenseConfig& cfg, const InitialCondition& init,
                  std::span<const double> t_grid_fs, const EvolveOptions& opts = {});

/// Largest change of <n> and <b^dagger b> along the trajectory when the
/// vibrational truncation is raised from cfg.n_vib_levels to cfg.n_vib_levels + 2.
double vib_truncation_shift(const ModelParams& params, const DenseConfig& cfg,
                            const InitialCondition& init, std::span<const double> t_grid_fs,
                            const EvolveOptions& opts = {});

}  // namespace superrad::dense
