#include "superrad/pibs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "superrad/error.hpp"
#include "superrad/liouville.hpp"

namespace superrad::pibs {

namespace {

std::string compact(double count) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", count);
  return buf;
}

void require_tc(const ModelParams& params) {
  if (params.is_htc()) {
    throw Error(ErrorCode::HTCNotSupported, "the exact solver covers the Tavis-Cummings model only");
  }
}

ModelParams validate_tc(const ModelParams& params) {
  require_tc(params);
  return validate(params);
}

void check_options(const SolveOptions& opts) {
  if (opts.t_grid_fs.empty()) throw Error(ErrorCode::InvalidParameter, "empty time grid");
  for (std::size_t k = 0; k < opts.t_grid_fs.size(); ++k) {
    if (!std::isfinite(opts.t_grid_fs[k]) || (k > 0 && opts.t_grid_fs[k] <= opts.t_grid_fs[k - 1])) {
      throw Error(ErrorCode::InvalidParameter, "time grid must be finite and strictly increasing");
    }
  }
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "rtol and atol must be > 0");
  }
}

// Observable sums over one block in amplitude coordinates.
struct BlockSums {
  double trace = 0.0;
  double photons = 0.0;
  double jz = 0.0;
  double jz2 = 0.0;
  double jpjm = 0.0;
};

BlockSums block_sums(const BlockState& b, int n) {
  const BlockIndex index(n, b.nu);
  BlockSums s;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const Pattern& p = index[i];
    const double amp = b.amps[static_cast<Eigen::Index>(i)].real();
    if (p.is_population()) {
      const double w = binomial(n, p.uu) * amp;
      const double jz = 0.5 * (p.uu - p.dd);
      s.trace += w;
      s.photons += (b.nu - p.uu) * w;
      s.jz += jz * w;
      s.jz2 += jz * jz * w;
      s.jpjm += p.uu * w;
    } else if (p.du == 1 && p.ud == 1) {
      s.jpjm += multiplicity(p) * amp;
    }
  }
  return s;
}

BlockSums total_sums(std::span<const BlockState> blocks, int n) {
  BlockSums t;
  for (const auto& b : blocks) {
    const BlockSums s = block_sums(b, n);
    t.trace += s.trace;
    t.photons += s.photons;
    t.jz += s.jz;
    t.jz2 += s.jz2;
    t.jpjm += s.jpjm;
  }
  return t;
}

}  // namespace

double trace(std::span<const BlockState> blocks, int n_emitters) {
  return total_sums(blocks, n_emitters).trace;
}

double photon_number(std::span<const BlockState> blocks, int n_emitters) {
  return total_sums(blocks, n_emitters).photons;
}

double sigma_z_mean(std::span<const BlockState> blocks, int n_emitters) {
  return 2.0 * total_sums(blocks, n_emitters).jz / n_emitters;
}

double collective_correlator(std::span<const BlockState> blocks, int n_emitters) {
  return total_sums(blocks, n_emitters).jpjm;
}

double j_squared(std::span<const BlockState> blocks, int n_emitters) {
  const BlockSums s = total_sums(blocks, n_emitters);
  return s.jpjm + s.jz2 - s.jz;
}

namespace {

std::int64_t sum_squares(std::int64_t m) { return m * (m + 1) * (2 * m + 1) / 6; }

}  // namespace

BlockLayout::BlockLayout(int n_emitters) : n_emitters_(n_emitters) {
  if (n_emitters < 1) throw Error(ErrorCode::ZeroEmitters, "n_emitters must be >= 1");
  offsets_.assign(static_cast<std::size_t>(n_emitters) + 2, 0);
  for (int nu = 0; nu <= n_emitters; ++nu) {
    offsets_[static_cast<std::size_t>(nu) + 1] = offsets_[static_cast<std::size_t>(nu)] + sum_squares(nu + 1);
  }
}

std::int64_t BlockLayout::square_base(int nu, int uu) {
  return sum_squares(nu + 1) - sum_squares(nu - uu + 1);
}

std::int64_t BlockLayout::local_index(int nu, const Pattern& p) const {
  return square_base(nu, p.uu) + static_cast<std::int64_t>(p.du) * (nu - p.uu + 1) + p.ud;
}

Eigen::VectorXcd BlockLayout::pack_block(int nu, const Eigen::VectorXcd& amps) const {
  const BlockIndex index(n_emitters_, nu);
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(block_size(nu));
  for (std::size_t i = 0; i < index.size(); ++i) {
    x[local_index(nu, index[i])] = amps[static_cast<Eigen::Index>(i)] * multiplicity(index[i]);
  }
  return x;
}

Eigen::VectorXcd BlockLayout::pack(std::span<const BlockState> blocks) const {
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(size());
  for (const auto& b : blocks) x.segment(offset(b.nu), block_size(b.nu)) = pack_block(b.nu, b.amps);
  return x;
}

std::vector<BlockState> BlockLayout::unpack(const Eigen::VectorXcd& x) const {
  std::vector<BlockState> out;
  for (int nu = 0; nu <= n_emitters_; ++nu) {
    const BlockIndex index(n_emitters_, nu);
    BlockState b{nu, Eigen::VectorXcd(static_cast<Eigen::Index>(index.size()))};
    for (std::size_t i = 0; i < index.size(); ++i) {
      b.amps[static_cast<Eigen::Index>(i)] = x[offset(nu) + local_index(nu, index[i])] / multiplicity(index[i]);
    }
    out.push_back(std::move(b));
  }
  return out;
}

StencilOperator::StencilOperator(const ModelParams& params)
    : params_(validate_tc(params)), layout_(params.n_emitters) {
  sqrt_.resize(static_cast<std::size_t>(params.n_emitters) + 2);
  for (std::size_t k = 0; k < sqrt_.size(); ++k) sqrt_[k] = std::sqrt(static_cast<double>(k));
}

namespace {

// One (m_uu, m_du) row of a block: pointers to every neighbour row, offset so
// that element ud of the target reads element ud of each pointer.
struct StencilRow {
  int nu, uu, du, s, room;
  const double* sq;
  double g, kappa, gamma, gphi, delta;
  const cplx* xr;
  const cplx* dn_a;   // (uu-1, du+1, ud)
  const cplx* dn_b;   // (uu-1, du, ud+1)
  const cplx* up_a;   // (uu+1, du, ud-1)
  const cplx* up_b;   // (uu+1, du-1, ud)
  const cplx* src_k;  // block nu+1, same pattern
  const cplx* src_g;  // block nu+1, (uu+1, du, ud)
  cplx* yr;
};

template <bool Interior>
inline void stencil_element(const StencilRow& r, int ud) {
  const int n = r.nu - r.uu - ud;
  const int np = r.nu - r.uu - r.du;
  const int dd = r.room - r.du - ud;
  const double* sq = r.sq;
  cplx left{}, right{};
  if (r.dn_a != nullptr) {
    left += (sq[n + 1] * (r.du + 1)) * r.dn_a[ud];
    right += (sq[np + 1] * (ud + 1)) * r.dn_b[ud];
  }
  if (Interior || ud >= 1) {
    left += (sq[n + 1] * (dd + 1)) * r.xr[ud - 1];
    if (r.up_a != nullptr) right += (sq[np] * (r.uu + 1)) * r.up_a[ud];
  }
  if (Interior || n >= 1) {
    if (r.up_b != nullptr) left += (sq[n] * (r.uu + 1)) * r.up_b[ud];
    if (Interior || dd >= 1) left += (sq[n] * (ud + 1)) * r.xr[ud + 1];
  }
  if ((Interior || dd >= 1) && np >= 1) right += (sq[np] * (r.du + 1)) * r.xr[ud + r.s];
  if (r.du >= 1) right += (sq[np + 1] * (dd + 1)) * r.xr[ud - r.s];

  // i g (right - left) + diag x, written out to stay off the complex-multiply slow path
  const cplx c = right - left;
  const double d_re = -0.5 * r.kappa * (n + np) - 0.5 * r.gamma * (2 * r.uu + ud + r.du) - 2.0 * r.gphi * (ud + r.du);
  const double d_im = -r.delta * (n - np);
  const cplx v = r.xr[ud];
  cplx out{d_re * v.real() - d_im * v.imag() - r.g * c.imag(), d_re * v.imag() + d_im * v.real() + r.g * c.real()};
  if (r.src_k != nullptr) {
    out += (r.kappa * sq[n + 1] * sq[np + 1]) * r.src_k[ud];
    if (Interior || dd >= 1) out += (r.gamma * (r.uu + 1)) * r.src_g[ud];
  }
  r.yr[ud] = out;
}

}  // namespace

void StencilOperator::apply_raw(int nu, const cplx* x, const cplx* src, cplx* y) const {
  StencilRow r{};
  r.nu = nu;
  r.sq = sqrt_.data();
  r.g = params_.g;
  r.kappa = params_.kappa;
  r.gamma = params_.gamma;
  r.gphi = params_.gamma_phi;
  r.delta = params_.delta;

  for (int uu = 0; uu <= nu; ++uu) {
    const int s = nu - uu + 1;
    const std::int64_t b0 = BlockLayout::square_base(nu, uu);
    r.uu = uu;
    r.s = s;
    r.room = params_.n_emitters - uu;
    for (int du = 0; du < s; ++du) {
      const int np = nu - uu - du;
      r.du = du;
      r.xr = x + b0 + static_cast<std::int64_t>(du) * s;
      r.yr = y + b0 + static_cast<std::int64_t>(du) * s;
      r.dn_a = r.dn_b = r.up_a = r.up_b = r.src_k = r.src_g = nullptr;
      if (uu >= 1) {
        const std::int64_t b_dn = BlockLayout::square_base(nu, uu - 1);
        r.dn_a = x + b_dn + static_cast<std::int64_t>(du + 1) * (s + 1);
        r.dn_b = x + b_dn + static_cast<std::int64_t>(du) * (s + 1) + 1;
      }
      if (uu < nu) {
        const std::int64_t b_up = BlockLayout::square_base(nu, uu + 1);
        if (np >= 1) r.up_a = x + b_up + static_cast<std::int64_t>(du) * (s - 1) - 1;
        if (du >= 1) r.up_b = x + b_up + static_cast<std::int64_t>(du - 1) * (s - 1);
      }
      if (src != nullptr) {
        r.src_k = src + BlockLayout::square_base(nu + 1, uu) + static_cast<std::int64_t>(du) * (s + 1);
        r.src_g = src + BlockLayout::square_base(nu + 1, uu + 1) + static_cast<std::int64_t>(du) * s;
      }

      // columns past ud_end are padding; 1..hi have every neighbour present
      const int ud_end = std::min(s - 1, r.room - du);
      const int hi = std::min(s - 2, r.room - du - 1);
      stencil_element<false>(r, 0);
      for (int ud = 1; ud <= hi; ++ud) stencil_element<true>(r, ud);
      for (int ud = std::max(hi + 1, 1); ud <= ud_end; ++ud) stencil_element<false>(r, ud);
      for (int ud = ud_end + 1; ud < s; ++ud) r.yr[ud] = cplx{};
    }
  }
}

void StencilOperator::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  y.resize(x.size());
  const int n = params_.n_emitters;
  for (int nu = 0; nu <= n; ++nu) {
    const cplx* src = nu < n ? x.data() + layout_.offset(nu + 1) : nullptr;
    apply_raw(nu, x.data() + layout_.offset(nu), src, y.data() + layout_.offset(nu));
  }
}

void StencilOperator::apply_block(int nu, const Eigen::VectorXcd& x, const Eigen::VectorXcd* source,
                                  Eigen::VectorXcd& y) const {
  y.resize(x.size());
  apply_raw(nu, x.data(), source != nullptr ? source->data() : nullptr, y.data());
}

AssembledOperator::AssembledOperator(const ModelParams& params) {
  require_tc(params);
  const int n = params.n_emitters;
  offsets_.assign(static_cast<std::size_t>(n) + 2, 0);
  for (int nu = 0; nu <= n; ++nu) {
    offsets_[static_cast<std::size_t>(nu) + 1] = offsets_[static_cast<std::size_t>(nu)] + block_size(n, nu);
  }
  std::vector<Eigen::Triplet<cplx, std::int64_t>> triplets;
  for (int nu = 0; nu <= n; ++nu) {
    const BlockIndex current(n, nu);
    const auto add = [&](const SparseBlockOp& op, std::int64_t col_offset) {
      for (int r = 0; r < op.matrix.outerSize(); ++r) {
        for (SparseRowMatrix::InnerIterator it(op.matrix, r); it; ++it) {
          triplets.emplace_back(offset(nu) + r, col_offset + it.col(), it.value());
        }
      }
    };
    add(build_L0(params, current, Coordinates::Weighted), offset(nu));
    if (nu < n) add(build_L1(params, current, BlockIndex(n, nu + 1), Coordinates::Weighted), offset(nu + 1));
  }
  matrix_.resize(offsets_.back(), offsets_.back());
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
}

StackedObservables::StackedObservables(const BlockLayout& layout) : n_emitters_(layout.n_emitters()) {
  const int n = n_emitters_;
  offsets_.resize(static_cast<std::size_t>(n) + 2);
  populations_.resize(static_cast<std::size_t>(n) + 1);
  pairs_.resize(static_cast<std::size_t>(n) + 1);
  for (int nu = 0; nu <= n; ++nu) {
    const auto nuu = static_cast<std::size_t>(nu);
    offsets_[nuu] = layout.offset(nu);
    for (int uu = 0; uu <= nu; ++uu) {
      const Pattern pop{uu, 0, 0, n - uu};
      populations_[nuu].push_back({layout.local_index(nu, pop), double(nu - uu), 0.5 * (2 * uu - n), double(uu)});
      if (uu + 1 <= nu && n - uu - 2 >= 0) pairs_[nuu].push_back(layout.local_index(nu, {uu, 1, 1, n - uu - 2}));
    }
  }
  offsets_.back() = layout.size();
}

StackedObservables::Values StackedObservables::evaluate(const Eigen::VectorXcd& x, int nu) const {
  Values v;
  double jz = 0.0, jz2 = 0.0, jpjm = 0.0;
  const int lo = nu < 0 ? 0 : nu;
  const int hi = nu < 0 ? n_emitters_ : nu;
  for (int b = lo; b <= hi; ++b) {
    const auto bu = static_cast<std::size_t>(b);
    const std::int64_t base = nu < 0 ? offsets_[bu] : 0;
    for (const auto& e : populations_[bu]) {
      const double w = x[static_cast<Eigen::Index>(base + e.local)].real();
      v.trace += w;
      v.photons += e.photons * w;
      jz += e.jz * w;
      jz2 += e.jz * e.jz * w;
      jpjm += e.up * w;
    }
    for (const auto i : pairs_[bu]) jpjm += x[static_cast<Eigen::Index>(base + i)].real();
  }
  v.sz_mean = 2.0 * jz / n_emitters_;
  v.j2 = jpjm + jz2 - jz;
  return v;
}

namespace {

void record(Trajectory& traj, std::size_t k, const StackedObservables::Values& v) {
  traj.photon_mean[k] += v.photons;
  traj.sz_mean[k] += v.sz_mean;
  traj.j2[k] += v.j2;
  traj.trace_residual[k] += v.trace;
}

}  // namespace

Trajectory solve(const ModelParams& params, const InitialCondition& init, const SolveOptions& opts) {
  require_tc(params);
  validate(init);
  check_options(opts);
  const int n = params.n_emitters;
  const double patterns = static_cast<double>(n + 3) * (n + 2) * (n + 1) / 6.0;
  if (patterns > static_cast<double>(opts.max_patterns)) {
    throw Error(ErrorCode::DimensionCap, "N = " + std::to_string(n) + " needs " + compact(patterns) +
                                             " patterns, cap is " + std::to_string(opts.max_patterns));
  }
  const ModelParams frame = to_rotating_frame(validate(params));
  const StencilOperator op(frame);
  const BlockLayout& layout = op.layout();
  const StackedObservables obs(layout);

  const std::size_t points = opts.t_grid_fs.size();
  std::vector<double> t_int(points);
  std::transform(opts.t_grid_fs.begin(), opts.t_grid_fs.end(), t_int.begin(), UnitSystem::fs_to_internal);

  Trajectory traj;
  traj.times_fs = opts.t_grid_fs;
  traj.photon_mean.assign(points, 0.0);
  traj.sz_mean.assign(points, 0.0);
  traj.j2.assign(points, 0.0);
  traj.trace_residual.assign(points, 0.0);  // accumulates the trace first

  ode::Options ode_opts;
  ode_opts.rtol = opts.rtol;
  ode_opts.atol = opts.atol;

  const Eigen::VectorXcd y0 = layout.pack(initial_blocks(n, init.theta));

  if (opts.mode == Mode::Joint) {
    ode_opts.method = opts.method;
    ode_opts.dense_output = opts.interpolate_outputs;
    Eigen::VectorXcd final_state;
    traj.stats = ode::integrate(
        [&](double, const ode::State& y, ode::State& dy) { op.apply(y, dy); }, y0, t_int, ode_opts,
        [&](std::size_t k, double, const ode::State& y) {
          record(traj, k, obs.evaluate(y));
          if (opts.keep_final_state && k + 1 == points) final_state = y;
        });
    if (opts.keep_final_state) traj.final_state = layout.unpack(final_state);
  } else {
    // cubic Hermite source interpolation matches the order of the 5(4) pair
    ode_opts.method = ode::Method::DormandPrince45;
    ode::HermiteTrack upper;
    ode::HermiteTrack current;
    Eigen::VectorXcd final_state(layout.size());
    for (int nu = n; nu >= 0; --nu) {
      current.clear();
      Eigen::VectorXcd source;
      const ode::RhsFn rhs = [&](double t, const ode::State& y, ode::State& dy) {
        if (nu < n) {
          upper.evaluate(t, source);
          op.apply_block(nu, y, &source, dy);
        } else {
          op.apply_block(nu, y, nullptr, dy);
        }
      };
      ode::StepFn on_step;
      if (nu > 0) {
        on_step = [&](double t, const ode::State& y, const ode::State& dy) { current.push(t, y, dy); };
      }
      const ode::Stats stats = ode::integrate(
          rhs, y0.segment(layout.offset(nu), layout.block_size(nu)), t_int, ode_opts,
          [&](std::size_t k, double, const ode::State& y) {
            record(traj, k, obs.evaluate(y, nu));
            if (opts.keep_final_state && k + 1 == points) {
              final_state.segment(layout.offset(nu), layout.block_size(nu)) = y;
            }
          },
          on_step);
      traj.stats.accepted += stats.accepted;
      traj.stats.rejected += stats.rejected;
      traj.stats.rhs_evals += stats.rhs_evals;
      std::swap(upper, current);
    }
    if (opts.keep_final_state) traj.final_state = layout.unpack(final_state);
  }

  for (auto& r : traj.trace_residual) r = std::abs(r - 1.0);
  return traj;
}

}  // namespace superrad::pibs
