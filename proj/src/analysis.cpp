#include "superrad/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "superrad/pibs.hpp"
#include "superrad/semiclassical.hpp"

namespace superrad::analysis {

namespace {

void check_series(std::span<const double> t, std::span<const double> n) {
  if (t.empty()) throw Error(ErrorCode::EmptyTrajectory, "trajectory has no samples");
  if (t.size() != n.size()) {
    throw Error(ErrorCode::InvalidParameter, "time and photon series differ in length");
  }
}

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least squares y = slope * t + intercept on centered data.
Line fit_line(std::span<const double> t, std::span<const double> n, std::size_t first,
              std::size_t last) {
  const double count = static_cast<double>(last - first + 1);
  double t_mean = 0.0, y_mean = 0.0;
  for (std::size_t k = first; k <= last; ++k) {
    t_mean += t[k];
    y_mean += std::log(n[k]);
  }
  t_mean /= count;
  y_mean /= count;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t k = first; k <= last; ++k) {
    const double dt = t[k] - t_mean;
    const double dy = std::log(n[k]) - y_mean;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  Line line;
  if (stt <= 0.0) return line;
  line.slope = sty / stt;
  line.intercept = y_mean - line.slope * t_mean;
  const double residual = std::max(0.0, syy - line.slope * sty);
  line.r_squared = syy > 0.0 ? 1.0 - residual / syy : 0.0;
  return line;
}

// Line fits of every sub-window of [first, last] from prefix sums.
class PrefixFit {
 public:
  PrefixFit(std::span<const double> t, std::span<const double> n, std::size_t first, std::size_t last)
      : first_(first) {
    const std::size_t count = last - first + 1;
    sums_.assign(count + 1, {});
    const long double t0 = t[first];
    const long double y0 = std::log(n[first]);
    for (std::size_t k = 0; k < count; ++k) {
      const long double x = t[first + k] - t0;
      const long double y = std::log(static_cast<long double>(n[first + k])) - y0;
      const Sums& p = sums_[k];
      sums_[k + 1] = {p.t + x, p.y + y, p.tt + x * x, p.ty + x * y, p.yy + y * y};
    }
  }

  // Same result as fit_line on [i, j] up to rounding; the intercept is not needed.
  Line fit(std::size_t i, std::size_t j) const {
    const Sums& a = sums_[i - first_];
    const Sums& b = sums_[j - first_ + 1];
    const long double count = static_cast<long double>(j - i + 1);
    const long double st = b.t - a.t, sy = b.y - a.y;
    const long double stt = (b.tt - a.tt) - st * st / count;
    const long double sty = (b.ty - a.ty) - st * sy / count;
    const long double syy = (b.yy - a.yy) - sy * sy / count;
    Line line;
    if (stt <= 0.0L) return line;
    line.slope = static_cast<double>(sty / stt);
    const long double residual = std::max(0.0L, syy - sty * sty / stt);
    line.r_squared = syy > 0.0L ? static_cast<double>(1.0L - residual / syy) : 0.0;
    return line;
  }

 private:
  struct Sums {
    long double t = 0, y = 0, tt = 0, ty = 0, yy = 0;
  };
  std::size_t first_;
  std::vector<Sums> sums_;
};

}  // namespace

FitResult fit_risetime(std::span<const double> t_fs, std::span<const double> n_over_n,
                       const Window& window, std::size_t min_points) {
  check_series(t_fs, n_over_n);
  if (window.first > window.last || window.last >= t_fs.size()) {
    throw Error(ErrorCode::DegenerateWindow, "window outside the trajectory");
  }
  if (window.points() < std::max<std::size_t>(min_points, 2)) {
    throw Error(ErrorCode::DegenerateWindow, "window has fewer than " + std::to_string(min_points) +
                                                 " samples");
  }
  for (std::size_t k = window.first; k <= window.last; ++k) {
    if (!(n_over_n[k] > 0.0) || !std::isfinite(n_over_n[k]) || !std::isfinite(t_fs[k])) {
      throw Error(ErrorCode::DegenerateWindow, "window contains a nonpositive or nonfinite value");
    }
  }
  const Line line = fit_line(t_fs, n_over_n, window.first, window.last);
  FitResult fit;
  fit.window = window;
  fit.window.t_start_fs = t_fs[window.first];
  fit.window.t_end_fs = t_fs[window.last];
  fit.r_squared = line.r_squared;
  fit.amplitude = std::exp(line.intercept);
  fit.tau_fs = line.slope != 0.0 ? 1.0 / line.slope : 0.0;
  fit.well_defined = line.slope > 0.0 && std::isfinite(fit.tau_fs) && std::isfinite(fit.amplitude);
  return fit;
}

std::optional<Window> detect_window(std::span<const double> t_fs, std::span<const double> n_over_n,
                                    const WindowOptions& opts) {
  check_series(t_fs, n_over_n);
  if (!(opts.lo > 0.0) || !(opts.hi > opts.lo)) {
    throw Error(ErrorCode::InvalidParameter, "window band needs 0 < lo < hi");
  }
  const auto inside = [&](std::size_t k) { return n_over_n[k] >= opts.lo && n_over_n[k] <= opts.hi; };
  const std::size_t min_points = std::max<std::size_t>(opts.min_points, 2);
  const std::size_t size = t_fs.size();
  std::optional<Window> best;
  std::size_t k = 0;
  while (k < size) {
    if (!inside(k)) {
      ++k;
      continue;
    }
    const std::size_t first = k;
    bool rising = true;
    for (++k; k < size && inside(k); ++k) rising = rising && n_over_n[k] >= n_over_n[k - 1];
    const std::size_t last = k - 1;
    if (!rising || last - first + 1 < min_points) continue;
    const PrefixFit prefix(t_fs, n_over_n, first, last);
    const std::size_t longest = last - first + 1;
    const std::size_t shortest = best ? best->points() + 1 : min_points;
    for (std::size_t len = longest; len >= shortest && !(best && best->first >= first); --len) {
      for (std::size_t i = first; i + len - 1 <= last; ++i) {
        const Line line = prefix.fit(i, i + len - 1);
        if (line.slope > 0.0 && line.r_squared >= opts.r2_min) {
          best = Window{i, i + len - 1, t_fs[i], t_fs[i + len - 1]};
          break;
        }
      }
    }
  }
  return best;
}

std::optional<FitResult> extract_risetime(std::span<const double> t_fs,
                                          std::span<const double> n_over_n,
                                          const WindowOptions& opts) {
  const auto window = detect_window(t_fs, n_over_n, opts);
  if (!window) return std::nullopt;
  return fit_risetime(t_fs, n_over_n, *window, opts.min_points);
}

Axis parse_axis(const std::string& name) {
  if (name == "S") return Axis::S;
  if (name == "gamma_phi") return Axis::GammaPhi;
  if (name == "delta") return Axis::Delta;
  if (name == "theta") return Axis::Theta;
  throw Error(ErrorCode::InvalidSweep, "unknown sweep axis '" + name + "'");
}

Solver parse_solver(const std::string& name) {
  if (name == "mf") return Solver::MF;
  if (name == "c2") return Solver::C2;
  if (name == "pibs") return Solver::PIBS;
  throw Error(ErrorCode::InvalidSweep, "unknown solver '" + name + "'");
}

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::S: return "S";
    case Axis::GammaPhi: return "gamma_phi";
    case Axis::Delta: return "delta";
    case Axis::Theta: return "theta";
  }
  return "";
}

std::string to_string(Solver solver) {
  switch (solver) {
    case Solver::MF: return "mf";
    case Solver::C2: return "c2";
    case Solver::PIBS: return "pibs";
  }
  return "";
}

void validate(const SweepSpec& spec) {
  if (spec.values.empty()) throw Error(ErrorCode::InvalidSweep, "no sweep values");
  for (double v : spec.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidSweep, "sweep values must be finite");
  }
  if (spec.t_grid_fs.empty()) throw Error(ErrorCode::InvalidSweep, "empty time grid");
  if (spec.jobs < 1) throw Error(ErrorCode::InvalidSweep, "jobs must be >= 1");
}

std::pair<ModelParams, InitialCondition> sweep_point(const SweepSpec& spec, double value) {
  ModelParams p = spec.base;
  InitialCondition init = spec.init;
  switch (spec.axis) {
    case Axis::S: p.huang_rhys = value; break;
    case Axis::GammaPhi: p.gamma_phi = value; break;
    case Axis::Delta: p.delta = value; break;
    case Axis::Theta: init.theta = value; break;
  }
  return {p, init};
}

namespace {

struct Series {
  std::vector<double> t;
  std::vector<double> n;
};

Series run_solver(const SweepSpec& spec, const ModelParams& p, const InitialCondition& init) {
  if (spec.solver == Solver::PIBS) {
    pibs::SolveOptions opts;
    opts.t_grid_fs = spec.t_grid_fs;
    opts.rtol = spec.rtol;
    opts.atol = spec.atol;
    auto traj = pibs::solve(p, init, opts);
    for (double& v : traj.photon_mean) v /= p.n_emitters;
    return {std::move(traj.times_fs), std::move(traj.photon_mean)};
  }
  semiclassical::SolveOptions opts;
  opts.t_grid_fs = spec.t_grid_fs;
  opts.rtol = spec.rtol;
  opts.atol = spec.atol;
  const auto method = spec.solver == Solver::MF ? semiclassical::Method::MF : semiclassical::Method::C2;
  auto traj = semiclassical::solve(method, p, init, opts);
  return {std::move(traj.times_fs), std::move(traj.photon_per_emitter)};
}

SweepPoint evaluate(const SweepSpec& spec, double value) {
  SweepPoint point;
  point.value = value;
  try {
    const auto [p, init] = sweep_point(spec, value);
    const Series s = run_solver(spec, p, init);
    const auto peak = std::max_element(s.n.begin(), s.n.end());
    const auto at = static_cast<std::size_t>(peak - s.n.begin());
    point.peak_n_over_n = *peak;
    point.t_peak_fs = s.t[at];
    point.final_n_over_n = s.n.back();
    const auto onset = std::find_if(s.n.begin(), s.n.end(), [&](double v) { return v >= spec.window.lo; });
    point.t_onset_fs = onset == s.n.end() ? std::numeric_limits<double>::quiet_NaN()
                                          : s.t[static_cast<std::size_t>(onset - s.n.begin())];
    if (spec.fit) point.fit = extract_risetime(s.t, s.n, spec.window);
  } catch (const Error& e) {
    point.error = e.code();
    point.message = e.what();
  }
  return point;
}

}  // namespace

std::vector<SweepPoint> run_sweep(const SweepSpec& spec) {
  validate(spec);
  const std::size_t count = spec.values.size();
  std::vector<SweepPoint> out(count);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next++; k < count; k = next++) out[k] = evaluate(spec, spec.values[k]);
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(spec.jobs), count);
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  return out;
}

}  // namespace superrad::analysis
