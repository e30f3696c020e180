#include "superrad/dense.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "superrad/error.hpp"

namespace superrad::dense {

namespace {

std::string compact(double count) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", count);
  return buf;
}

using Triplet = Eigen::Triplet<cplx, std::int64_t>;

SparseMatrix from_dense(const Eigen::MatrixXcd& m) {
  std::vector<Triplet> t;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) != cplx{}) t.emplace_back(i, j, m(i, j));
    }
  }
  SparseMatrix s(m.rows(), m.cols());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

SparseMatrix identity(std::int64_t d) {
  SparseMatrix s(d, d);
  s.setIdentity();
  return s;
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (std::int64_t ja = 0; ja < a.outerSize(); ++ja) {
    for (SparseMatrix::InnerIterator ia(a, ja); ia; ++ia) {
      for (std::int64_t jb = 0; jb < b.outerSize(); ++jb) {
        for (SparseMatrix::InnerIterator ib(b, jb); ib; ++ib) {
          t.emplace_back(ia.row() * b.rows() + ib.row(), ja * b.cols() + jb, ia.value() * ib.value());
        }
      }
    }
  }
  SparseMatrix s(a.rows() * b.rows(), a.cols() * b.cols());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

Eigen::MatrixXcd kron_dense(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Lowering operator on d levels.
Eigen::MatrixXcd lowering(int d) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 1; k < d; ++k) m(k - 1, k) = std::sqrt(static_cast<double>(k));
  return m;
}

Eigen::MatrixXcd thermal_state(int levels, double omega, double temperature, bool thermal) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(levels, levels);
  if (!thermal || temperature == 0.0) {
    m(0, 0) = 1.0;
    return m;
  }
  double norm = 0.0;
  for (int k = 0; k < levels; ++k) {
    const double w = std::exp(-k * omega / temperature);
    m(k, k) = w;
    norm += w;
  }
  return m / norm;
}

}  // namespace

DenseSystem::DenseSystem(const ModelParams& params, const DenseConfig& cfg)
    : params_(params), model_(cfg.model) {
  const int n = params.n_emitters;
  if (n < 1) throw Error(ErrorCode::ZeroEmitters, "n_emitters must be >= 1");
  photon_levels_ = cfg.n_photon_levels > 0 ? cfg.n_photon_levels : n + 1;
  vib_levels_ = model_ == Model::HTC ? cfg.n_vib_levels : 1;
  if (vib_levels_ < 1) throw Error(ErrorCode::InvalidParameter, "n_vib_levels must be >= 1");

  double dim = photon_levels_;
  for (int k = 0; k < n; ++k) dim *= 2.0 * vib_levels_;
  if (dim > static_cast<double>(cfg.dimension_cap)) {
    throw Error(ErrorCode::DimensionCap, "Hilbert dimension " + compact(dim) +
                                             " exceeds cap " + std::to_string(cfg.dimension_cap));
  }
  dim_ = static_cast<std::int64_t>(dim);

  dims_.push_back(photon_levels_);
  for (int k = 0; k < n; ++k) {
    dims_.push_back(2);
    if (model_ == Model::HTC) dims_.push_back(vib_levels_);
  }

  const cplx i{0.0, 1.0};
  const SparseMatrix a = embed(from_dense(lowering(photon_levels_)), 0);
  const SparseMatrix a_dag = a.adjoint();
  n_op_ = a_dag * a;

  Eigen::MatrixXcd sm_local = Eigen::MatrixXcd::Zero(2, 2);
  sm_local(0, 1) = 1.0;  // |down><up|
  Eigen::MatrixXcd sz_local = Eigen::MatrixXcd::Zero(2, 2);
  sz_local(0, 0) = -1.0;
  sz_local(1, 1) = 1.0;

  hamiltonian_ = params.cavity_frequency() * n_op_;
  SparseMatrix sm_sum(dim_, dim_);
  sz_op_ = SparseMatrix(dim_, dim_);
  b_op_ = SparseMatrix(dim_, dim_);
  nb_op_ = SparseMatrix(dim_, dim_);

  const ThermalizationRates thermal =
      model_ == Model::HTC ? thermalization_rates(params) : ThermalizationRates{};
  for (int k = 0; k < n; ++k) {
    const SparseMatrix sm = embed(from_dense(sm_local), emitter_factor(k));
    const SparseMatrix sp = sm.adjoint();
    const SparseMatrix sz = embed(from_dense(sz_local), emitter_factor(k));
    sm_sum += sm;
    sz_op_ += sz;
    hamiltonian_ += 0.5 * params.omega0 * sz;
    hamiltonian_ += params.g * (SparseMatrix(a * sp) + SparseMatrix(a_dag * sm));
    if (params.gamma > 0.0) jumps_.push_back({params.gamma, sm, sp});
    if (params.gamma_phi > 0.0) jumps_.push_back({params.gamma_phi, sz, sz});

    if (model_ == Model::HTC) {
      const SparseMatrix b = embed(from_dense(lowering(vib_levels_)), emitter_factor(k) + 1);
      const SparseMatrix b_dag = b.adjoint();
      const SparseMatrix nb = b_dag * b;
      b_op_ += b;
      nb_op_ += nb;
      const double sqrt_s = std::sqrt(params.huang_rhys);
      hamiltonian_ += params.omega_nu * nb;
      hamiltonian_ += sqrt_s * params.omega_nu * SparseMatrix((b + b_dag) * sz);
      // Lamb shift of the momentum-damping thermalization
      hamiltonian_ += i * (params.gamma_nu / 4.0) * SparseMatrix(b_dag * b_dag - b * b);
      if (thermal.up > 0.0) jumps_.push_back({thermal.up, b_dag, b});
      if (thermal.down > 0.0) jumps_.push_back({thermal.down, b, b_dag});
    }
  }
  if (params.kappa > 0.0) jumps_.push_back({params.kappa, a, a_dag});

  sp_op_ = sm_sum.adjoint();
  const SparseMatrix jz = 0.5 * sz_op_;
  j2_op_ = SparseMatrix(sp_op_ * sm_sum) + SparseMatrix(jz * jz) - jz;

  h_eff_ = hamiltonian_;
  for (const auto& j : jumps_) h_eff_ -= (0.5 * j.rate) * i * SparseMatrix(j.op_dag * j.op);
  h_eff_.makeCompressed();
  h_eff_dag_ = h_eff_.adjoint();
}

int DenseSystem::emitter_factor(int k) const {
  return model_ == Model::HTC ? 1 + 2 * k : 1 + k;
}

SparseMatrix DenseSystem::embed(const SparseMatrix& local, int factor) const {
  std::int64_t left = 1;
  std::int64_t right = 1;
  for (int f = 0; f < factor; ++f) left *= dims_[static_cast<std::size_t>(f)];
  for (std::size_t f = static_cast<std::size_t>(factor) + 1; f < dims_.size(); ++f) right *= dims_[f];
  const std::int64_t d = local.rows();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(left * right * local.nonZeros()));
  for (std::int64_t col = 0; col < local.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(local, col); it; ++it) {
      for (std::int64_t l = 0; l < left; ++l) {
        for (std::int64_t r = 0; r < right; ++r) {
          t.emplace_back((l * d + it.row()) * right + r, (l * d + col) * right + r, it.value());
        }
      }
    }
  }
  SparseMatrix s(dim_, dim_);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

void DenseSystem::apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
  const cplx i{0.0, 1.0};
  out = -i * (h_eff_ * rho);
  out += i * (rho * h_eff_dag_);
  Eigen::MatrixXcd tmp;
  for (const auto& j : jumps_) {
    tmp = j.op * rho;
    out.noalias() += j.rate * (tmp * j.op_dag);
  }
}

SparseMatrix DenseSystem::liouvillian() const {
  const cplx i{0.0, 1.0};
  const SparseMatrix id = identity(dim_);
  const SparseMatrix h_conj = h_eff_.conjugate();
  SparseMatrix l = -i * kron(id, h_eff_) + i * kron(h_conj, id);
  for (const auto& j : jumps_) {
    const SparseMatrix c_conj = j.op.conjugate();
    l += j.rate * kron(c_conj, j.op);
  }
  l.makeCompressed();
  return l;
}

Eigen::MatrixXcd DenseSystem::initial_state(const InitialCondition& init) const {
  validate(init);
  const SiteDensity rho1 = single_emitter_density(init.theta);
  Eigen::MatrixXcd emitter(2, 2);
  emitter(0, 0) = rho1[SiteUnit::dd];
  emitter(1, 1) = rho1[SiteUnit::uu];
  emitter(1, 0) = rho1[SiteUnit::ud];  // |up><down|
  emitter(0, 1) = rho1[SiteUnit::du];  // |down><up|
  Eigen::MatrixXcd site = emitter;
  if (model_ == Model::HTC) {
    site = kron_dense(emitter, thermal_state(vib_levels_, params_.omega_nu, params_.temperature,
                                             init.vib_thermal));
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(photon_levels_, photon_levels_);
  rho(0, 0) = 1.0;
  for (int k = 0; k < params_.n_emitters; ++k) rho = kron_dense(rho, site);
  return rho;
}

SparseMatrix build_liouvillian(const ModelParams& params, const DenseConfig& cfg) {
  return DenseSystem(params, cfg).liouvillian();
}

cplx expectation(const SparseMatrix& op, const Eigen::MatrixXcd& rho) {
  cplx sum{};
  for (std::int64_t col = 0; col < op.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(op, col); it; ++it) sum += it.value() * rho(col, it.row());
  }
  return sum;
}

Trajectory evolve(const ModelParams& params, const DenseConfig& cfg, const InitialCondition& init,
                  std::span<const double> t_grid_fs, const EvolveOptions& opts) {
  const DenseSystem sys(params, cfg);
  const auto d = static_cast<Eigen::Index>(sys.dimension());
  const double n = params.n_emitters;
  const bool htc = cfg.model == Model::HTC;
  const bool monitor = sys.dimension() <= opts.positivity_dimension;

  std::vector<double> t_int(t_grid_fs.size());
  std::transform(t_grid_fs.begin(), t_grid_fs.end(), t_int.begin(), UnitSystem::fs_to_internal);

  Trajectory traj;
  Eigen::MatrixXcd rho0 = sys.initial_state(init);
  ode::State y0 = Eigen::Map<ode::State>(rho0.data(), d * d);

  // the assembled superoperator is several times faster while it fits in memory
  SparseMatrix superop;
  if (sys.dimension() <= opts.superoperator_dimension) superop = sys.liouvillian();
  ode::RhsFn rhs = [&](double, const ode::State& y, ode::State& dy) {
    if (superop.size() > 0) {
      dy.noalias() = superop * y;
      return;
    }
    const Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(y.data(), d, d);
    Eigen::MatrixXcd out;
    sys.apply(rho, out);
    dy = Eigen::Map<ode::State>(out.data(), d * d);
  };

  ode::OutputFn record = [&](std::size_t, double t, const ode::State& y) {
    const Eigen::Map<const Eigen::MatrixXcd> rho(y.data(), d, d);
    const Eigen::MatrixXcd r = rho;
    traj.times_fs.push_back(UnitSystem::internal_to_fs(t));
    traj.photon_mean.push_back(expectation(sys.photon_number(), r).real());
    traj.sigma_plus.push_back(expectation(sys.sigma_plus_sum(), r) / n);
    traj.sz_mean.push_back(expectation(sys.sigma_z_sum(), r).real() / n);
    traj.j2.push_back(expectation(sys.j_squared(), r).real());
    if (htc) {
      traj.b_mean.push_back(expectation(sys.b_sum(), r) / n);
      traj.b_occupation.push_back(expectation(sys.b_occupation_sum(), r).real() / n);
    }
    traj.trace_residual.push_back(std::abs(r.trace() - 1.0));
    traj.hermiticity_residual.push_back((r - r.adjoint()).cwiseAbs().maxCoeff());
    if (monitor) {
      const Eigen::MatrixXcd herm = 0.5 * (r + r.adjoint());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm, Eigen::EigenvaluesOnly);
      const double lo = eig.eigenvalues().minCoeff();
      traj.min_eigenvalue.push_back(lo);
      if (lo < -opts.positivity_tolerance) {
        traj.warnings.push_back("PositivityViolation: min eigenvalue " + std::to_string(lo) +
                                " at t = " + std::to_string(traj.times_fs.back()) + " fs");
      }
    }
  };

  ode::integrate(rhs, std::move(y0), t_int, opts.ode, record);
  return traj;
}

double vib_truncation_shift(const ModelParams& params, const DenseConfig& cfg,
                            const InitialCondition& init, std::span<const double> t_grid_fs,
                            const EvolveOptions& opts) {
  DenseConfig wider = cfg;
  wider.n_vib_levels += 2;
  const Trajectory base = evolve(params, cfg, init, t_grid_fs, opts);
  const Trajectory ref = evolve(params, wider, init, t_grid_fs, opts);
  double shift = 0.0;
  for (std::size_t k = 0; k < base.times_fs.size(); ++k) {
    shift = std::max(shift, std::abs(base.photon_mean[k] - ref.photon_mean[k]));
    if (!base.b_occupation.empty()) {
      shift = std::max(shift, std::abs(base.b_occupation[k] - ref.b_occupation[k]));
    }
  }
  return shift;
}

}  // namespace superrad::dense
