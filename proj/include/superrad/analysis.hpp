#pragma once

// Risetime extraction from the exponential regime of <n>/N and parameter
// sweeps over the solvers. Times are in fs throughout.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "superrad/error.hpp"
#include "superrad/model.hpp"

namespace superrad::analysis {

struct WindowOptions {
  double lo = 3e-6;  // band on <n>/N
  double hi = 3e-4;
  double r2_min = 0.999;
  std::size_t min_points = 4;
};

/// Inclusive sample range [first, last] of a trajectory.
struct Window {
  std::size_t first = 0;
  std::size_t last = 0;
  double t_start_fs = 0.0;
  double t_end_fs = 0.0;

  std::size_t points() const { return last - first + 1; }
};

struct FitResult {
  double tau_fs = 0.0;
  double amplitude = 0.0;  // <n>/N = amplitude * exp(t / tau)
  Window window;
  double r_squared = 0.0;
  bool well_defined = false;  // slope > 0 and every value finite
};

/// Least-squares line through (t, ln n) over the window.
/// Throws EmptyTrajectory, InvalidParameter (length mismatch), DegenerateWindow
/// (out of range, fewer than min_points samples or a nonpositive value).
FitResult fit_risetime(std::span<const double> t_fs, std::span<const double> n_over_n,
                       const Window& window, std::size_t min_points = 4);

/// Longest sub-window with at least min_points samples, a positive slope and
/// R^2 >= r2_min inside a contiguous run of samples with lo <= n <= hi along
/// which n never decreases. Ties go to the earliest start.
/// Throws EmptyTrajectory, InvalidParameter.
std::optional<Window> detect_window(std::span<const double> t_fs, std::span<const double> n_over_n,
                                    const WindowOptions& opts = {});

/// detect_window followed by fit_risetime; nullopt when no window qualifies.
std::optional<FitResult> extract_risetime(std::span<const double> t_fs,
                                          std::span<const double> n_over_n,
                                          const WindowOptions& opts = {});

enum class Axis { S, GammaPhi, Delta, Theta };
enum class Solver { MF, C2, PIBS };

/// Throws InvalidSweep for an unknown name.
Axis parse_axis(const std::string& name);
Solver parse_solver(const std::string& name);
std::string to_string(Axis axis);
std::string to_string(Solver solver);

struct SweepSpec {
  Axis axis = Axis::S;
  std::vector<double> values;
  Solver solver = Solver::MF;
  ModelParams base;
  InitialCondition init;
  std::vector<double> t_grid_fs;
  double rtol = 1e-10;
  double atol = 1e-12;
  WindowOptions window;
  bool fit = true;
  int jobs = 1;
};

/// Throws InvalidSweep: empty or nonfinite values, empty grid, jobs < 1.
void validate(const SweepSpec& spec);

/// Parameters and initial condition of one sweep point.
std::pair<ModelParams, InitialCondition> sweep_point(const SweepSpec& spec, double value);

struct SweepPoint {
  double value = 0.0;
  std::optional<FitResult> fit;  // empty when no window qualifies or fit is off
  double peak_n_over_n = 0.0;
  double t_peak_fs = 0.0;
  double final_n_over_n = 0.0;
  double t_onset_fs = 0.0;  // first sample with n >= window lo; NaN if never
  std::optional<ErrorCode> error;
  std::string message;
};

/// One solver run per value, results in input order. A failing point records
/// its error and the sweep continues. Throws InvalidSweep.
std::vector<SweepPoint> run_sweep(const SweepSpec& spec);

}  // namespace superrad::analysis
