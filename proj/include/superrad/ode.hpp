#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace superrad::ode {

using State = Eigen::VectorXcd;

/// dydt = f(t, y). dydt is pre-sized; implementations overwrite it.
using RhsFn = std::function<void(double t, const State& y, State& dydt)>;

/// Called once per requested output time; index runs over the output grid.
using OutputFn = std::function<void(std::size_t index, double t, const State& y)>;

/// Called at the initial point and after every accepted step with the state
/// and its derivative at the step end (used for Hermite dense output).
using StepFn = std::function<void(double t, const State& y, const State& dydt)>;

enum class Method {
  DormandPrince45,  // 5(4) pair, FSAL
  DormandPrince853, // 8(5,3) pair
};

struct Options {
  double rtol = 1e-8;
  double atol = 1e-10;
  Method method = Method::DormandPrince853;
  double initial_step = 0.0;  // 0 selects automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
  /// DormandPrince45 only: step freely and evaluate interior outputs from the
  /// 4th-order continuous extension; the final output is still landed on.
  bool dense_output = false;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

/// Adaptive embedded Runge-Kutta integration over a strictly increasing
/// output grid. Unless Options::dense_output is set, steps are shortened to
/// land exactly on every output time, so outputs carry no interpolation error. The state at t_out[0] is y0.
/// Throws Error{ToleranceNotMet} when the step size underflows or max_steps
/// is exceeded, Error{NonfiniteState} when the solution leaves the finite range.
Stats integrate(const RhsFn& rhs, State y0, std::span<const double> t_out, const Options& opts,
                const OutputFn& on_output, const StepFn& on_step = {});

/// Weighted RMS norm used for step-size control:
/// sqrt(mean((|v_i| / (atol + rtol * max(|y_i|, |z_i|)))^2)).
double error_norm(const State& v, const State& y, const State& z, double rtol, double atol);

/// Piecewise cubic Hermite interpolant over stored (t, y, dy/dt) knots.
class HermiteTrack {
 public:
  void push(double t, const State& y, const State& dydt);
  void clear();
  bool empty() const { return times_.empty(); }
  double front_time() const { return times_.front(); }
  double back_time() const { return times_.back(); }
  std::size_t knots() const { return times_.size(); }

  /// Evaluates into out (resized as needed). t must lie within the knots.
  void evaluate(double t, State& out) const;

 private:
  std::vector<double> times_;
  std::vector<State> values_;
  std::vector<State> slopes_;
};

}  // namespace superrad::ode
