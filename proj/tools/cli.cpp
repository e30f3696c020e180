#include "superrad/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "superrad/analysis.hpp"
#include "superrad/config.hpp"
#include "superrad/dense.hpp"
#include "superrad/error.hpp"
#include "superrad/model.hpp"
#include "superrad/pibs.hpp"
#include "superrad/semiclassical.hpp"

#ifndef SUPERRAD_VERSION
#define SUPERRAD_VERSION "unknown"
#endif

namespace superrad::cli {

namespace fs = std::filesystem;
using config::Config;
using json = nlohmann::ordered_json;

std::string schema_line(const std::string& kind) {
  return "# superrad schema=" + std::to_string(kCsvSchemaVersion) + " kind=" + kind;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"model",
     {"n_emitters", "g_collective", "delta", "kappa", "gamma", "gamma_phi", "omega0", "huang_rhys",
      "omega_nu", "gamma_nu", "temperature"}},
    {"initial", {"theta", "theta_pi", "vib_thermal"}},
    {"time", {"t_min_fs", "t_max_fs", "points"}},
    {"solver", {"rtol", "atol", "mode", "integrator"}},
    {"semiclassical", {"method"}},
    {"oracle", {"model", "photon_levels", "vib_levels", "dimension_cap"}},
    {"sweep", {"axis", "values", "solver", "fit", "jobs"}},
    {"analysis", {"window_lo", "window_hi", "r2_min", "min_points"}},
    {"output", {"name", "dir"}},
};

// Raised for problems found before any solver runs; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void usage(const std::string& what) { throw UsageError(what); }

// Flags shared by every subcommand; empty strings are unset.
struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string name;
  std::string tmax;
  std::string points;
  std::string rtol;
  std::string atol;
  std::vector<std::string> overrides;  // section.key=value
};

struct Output {
  fs::path csv;
  fs::path manifest;
};

ModelParams model_params(const Config& cfg, bool allow_zero_coupling = false) {
  ModelParams p;
  const long long n = cfg.get_int("model", "n_emitters");
  if (n < 1 || n > std::numeric_limits<int>::max()) {
    throw Error(ErrorCode::ZeroEmitters, "model.n_emitters must be a positive int");
  }
  p.n_emitters = static_cast<int>(n);
  p.g_collective = cfg.get_double("model", "g_collective");
  p.delta = cfg.get_double("model", "delta");
  p.kappa = cfg.get_double("model", "kappa");
  p.gamma = cfg.get_double("model", "gamma");
  p.gamma_phi = cfg.get_double("model", "gamma_phi", 0.0);
  p.omega0 = cfg.get_double("model", "omega0", 0.0);
  p.huang_rhys = cfg.get_double("model", "huang_rhys", 0.0);
  const bool vibrations = p.huang_rhys > 0.0;
  p.omega_nu = vibrations ? cfg.get_double("model", "omega_nu") : cfg.get_double("model", "omega_nu", 0.0);
  p.gamma_nu = vibrations ? cfg.get_double("model", "gamma_nu") : cfg.get_double("model", "gamma_nu", 0.0);
  p.temperature =
      vibrations ? cfg.get_double("model", "temperature") : cfg.get_double("model", "temperature", 0.0);
  if (allow_zero_coupling && p.g_collective == 0.0) {
    ModelParams probe = p;
    probe.g_collective = 1.0;
    probe = validate(probe);
    probe.g_collective = 0.0;
    probe.g = 0.0;
    return probe;
  }
  return validate(p);
}

InitialCondition initial_condition(const Config& cfg) {
  const bool plain = cfg.has("initial", "theta");
  const bool scaled = cfg.has("initial", "theta_pi");
  if (plain && scaled) usage("give either initial.theta or initial.theta_pi, not both");
  InitialCondition init;
  init.theta = scaled ? cfg.get_double("initial", "theta_pi") * std::numbers::pi
                      : cfg.get_double("initial", "theta");
  init.vib_thermal = cfg.get_bool("initial", "vib_thermal", true);
  validate(init);
  return init;
}

std::vector<double> time_grid(const Config& cfg) {
  const double t0 = cfg.get_double("time", "t_min_fs", 0.0);
  const double t1 = cfg.get_double("time", "t_max_fs");
  const long long points = cfg.get_int("time", "points");
  if (points < 2) usage("time.points must be >= 2");
  if (!(t1 > t0) || !std::isfinite(t1) || !std::isfinite(t0)) usage("time.t_max_fs must exceed time.t_min_fs");
  std::vector<double> t(static_cast<std::size_t>(points));
  for (long long k = 0; k < points; ++k) {
    t[static_cast<std::size_t>(k)] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return t;
}

ode::Method integrator(const std::string& name) {
  if (name == "dp45") return ode::Method::DormandPrince45;
  if (name == "dop853") return ode::Method::DormandPrince853;
  usage("unknown integrator '" + name + "' (dp45 | dop853)");
}

std::string integrator_name(ode::Method m) { return m == ode::Method::DormandPrince45 ? "dp45" : "dop853"; }

void apply_common(Config& cfg, const CommonFlags& f) {
  if (!f.tmax.empty()) cfg.set("time", "t_max_fs", f.tmax);
  if (!f.points.empty()) cfg.set("time", "points", f.points);
  if (!f.rtol.empty()) cfg.set("solver", "rtol", f.rtol);
  if (!f.atol.empty()) cfg.set("solver", "atol", f.atol);
  if (!f.name.empty()) cfg.set("output", "name", f.name);
  for (const auto& item : f.overrides) {
    const std::size_t dot = item.find('.');
    const std::size_t eq = item.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot == 0 || eq < dot + 2 || eq + 1 == item.size()) {
      usage("--set expects section.key=value, got '" + item + "'");
    }
    cfg.set(item.substr(0, dot), item.substr(dot + 1, eq - dot - 1), item.substr(eq + 1));
  }
}

Output output_paths(const Config& cfg, const CommonFlags& f, const std::string& command) {
  fs::path dir = cfg.get_string("output", "dir", ".");
  if (const char* env = std::getenv("SUPERRAD_OUTPUT_DIR"); env && *env) dir = env;
  if (!f.out_dir.empty()) dir = f.out_dir;
  const std::string stem = fs::path(f.config_path).stem().string();
  const std::string name = cfg.get_string("output", "name", stem + "_" + command);
  if (name.empty() || name.find('/') != std::string::npos) usage("invalid output name '" + name + "'");
  return {dir / (name + ".csv"), dir / (name + ".manifest.json")};
}

class CsvWriter {
 public:
  CsvWriter(const std::string& kind, const std::vector<std::string>& columns) : width_(columns.size()) {
    text_ << schema_line(kind) << '\n';
    for (std::size_t c = 0; c < columns.size(); ++c) text_ << (c ? "," : "") << columns[c];
    text_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
    for (std::size_t c = 0; c < cells.size(); ++c) text_ << (c ? "," : "") << cells[c];
    text_ << '\n';
    ++rows_;
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    row(cells);
  }

  std::size_t rows() const { return rows_; }

  void save(const fs::path& path) const {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text_.str();
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  }

 private:
  std::size_t width_;
  std::size_t rows_ = 0;
  std::ostringstream text_;
};

json stats_json(const ode::Stats& s) {
  return {{"accepted_steps", s.accepted}, {"rejected_steps", s.rejected}, {"rhs_evaluations", s.rhs_evals}};
}

// Result of a command body, completed into the manifest by run_command.
struct Record {
  std::string solver;
  std::string kind;
  json tolerances = json::object();
  json extra = json::object();
  std::vector<std::string> warnings;
};

struct Invocation {
  std::string command;
  std::vector<std::string> argv;
  CommonFlags flags;
};

int run_command(const Invocation& inv, const std::function<void(Config&)>& apply_flags,
                const std::function<std::function<Record(std::optional<CsvWriter>&)>(const Config&)>& prepare,
                std::ostream& out, std::ostream& err) {
  Config cfg;
  Output paths;
  std::function<Record(std::optional<CsvWriter>&)> body;
  try {
    cfg = Config::load(inv.flags.config_path);
    cfg.require_known(kSchema);
    apply_common(cfg, inv.flags);
    apply_flags(cfg);
    cfg.require_known(kSchema);
    paths = output_paths(cfg, inv.flags, inv.command);
    body = prepare(cfg);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  std::optional<CsvWriter> csv;
  Record record;
  try {
    record = body(csv);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json config_echo = json::object();
  for (const auto& [section, entries] : cfg.sections()) {
    for (const auto& [key, value] : entries) config_echo[section][key] = value;
  }
  json manifest;
  manifest["schema"] = "superrad.manifest/1";
  manifest["command"] = inv.command;
  manifest["solver"] = record.solver;
  manifest["version"] = SUPERRAD_VERSION;
  manifest["config_path"] = inv.flags.config_path;
  manifest["config"] = config_echo;
  manifest["arguments"] = inv.argv;
  manifest["tolerances"] = record.tolerances;
  manifest["wall_time_s"] = wall;
  manifest["csv_schema"] = {{"version", kCsvSchemaVersion}, {"kind", record.kind}};
  manifest["rows"] = csv->rows();
  manifest["outputs"] = {paths.csv.string(), paths.manifest.string()};
  manifest["warnings"] = record.warnings;
  for (const auto& [key, value] : record.extra.items()) manifest[key] = value;

  try {
    csv->save(paths.csv);
    std::ofstream m(paths.manifest, std::ios::binary);
    m << manifest.dump(2) << '\n';
    if (!m) throw std::runtime_error("cannot write '" + paths.manifest.string() + "'");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  for (const auto& w : record.warnings) err << "warning: " << w << '\n';
  out << "wrote " << paths.csv.string() << " (" << csv->rows() << " rows, " << wall << " s)\n";
  return 0;
}

// exact -----------------------------------------------------------------------

std::function<Record(std::optional<CsvWriter>&)> prepare_exact(const Config& cfg) {
  const ModelParams p = model_params(cfg);
  if (p.is_htc()) usage("the exact solver covers the Tavis-Cummings model only (model.huang_rhys must be 0)");
  const InitialCondition init = initial_condition(cfg);
  pibs::SolveOptions opts;
  opts.t_grid_fs = time_grid(cfg);
  opts.rtol = cfg.get_double("solver", "rtol", 1e-8);
  opts.atol = cfg.get_double("solver", "atol", 1e-10);
  const std::string mode = cfg.get_string("solver", "mode", "joint");
  if (mode == "joint") {
    opts.mode = pibs::Mode::Joint;
  } else if (mode == "sequential") {
    opts.mode = pibs::Mode::Sequential;
  } else {
    usage("unknown solver.mode '" + mode + "' (joint | sequential)");
  }
  opts.method = integrator(cfg.get_string("solver", "integrator", "dp45"));
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) usage("solver.rtol and solver.atol must be > 0");

  return [p, init, opts, mode](std::optional<CsvWriter>& csv) {
    const pibs::Trajectory tr = pibs::solve(p, init, opts);
    csv.emplace("exact", std::vector<std::string>{"t_fs", "n_mean", "n_over_N", "sz", "j2", "trace_residual"});
    const double n = p.n_emitters;
    for (std::size_t k = 0; k < tr.times_fs.size(); ++k) {
      csv->row(std::vector<double>{tr.times_fs[k], tr.photon_mean[k], tr.photon_mean[k] / n, tr.sz_mean[k],
                                   tr.j2[k], tr.trace_residual[k]});
    }
    Record r;
    const std::string method = opts.mode == pibs::Mode::Joint ? integrator_name(opts.method) : "dp45";
    r.solver = "pibs-" + mode + "-" + method;
    r.kind = "exact";
    r.tolerances = {{"rtol", opts.rtol}, {"atol", opts.atol}};
    r.extra["stats"] = stats_json(tr.stats);
    return r;
  };
}

// semiclassical ---------------------------------------------------------------

std::function<Record(std::optional<CsvWriter>&)> prepare_semiclassical(const Config& cfg) {
  const ModelParams p = model_params(cfg);
  const InitialCondition init = initial_condition(cfg);
  const std::string name = cfg.get_string("semiclassical", "method");
  semiclassical::Method method;
  if (name == "mf") {
    method = semiclassical::Method::MF;
  } else if (name == "c2") {
    method = semiclassical::Method::C2;
    if (p.is_htc()) usage("method c2 requires model.huang_rhys = 0");
  } else {
    usage("unknown semiclassical method '" + name + "' (mf | c2)");
  }
  semiclassical::SolveOptions opts;
  opts.t_grid_fs = time_grid(cfg);
  opts.rtol = cfg.get_double("solver", "rtol", 1e-10);
  opts.atol = cfg.get_double("solver", "atol", 1e-12);
  opts.method = integrator(cfg.get_string("solver", "integrator", "dop853"));
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) usage("solver.rtol and solver.atol must be > 0");

  return [p, init, opts, method, name](std::optional<CsvWriter>& csv) {
    const semiclassical::Trajectory tr = semiclassical::solve(method, p, init, opts);
    csv.emplace("semiclassical", std::vector<std::string>{"t_fs", "n_over_N", "coherence", "sz", "j2"});
    for (std::size_t k = 0; k < tr.times_fs.size(); ++k) {
      csv->row(std::vector<double>{tr.times_fs[k], tr.photon_per_emitter[k], tr.coherence[k], tr.sz_mean[k],
                                   tr.j2[k]});
    }
    Record r;
    r.solver = name + "-" + integrator_name(opts.method);
    r.kind = "semiclassical";
    r.tolerances = {{"rtol", opts.rtol}, {"atol", opts.atol}};
    r.extra["stats"] = stats_json(tr.stats);
    return r;
  };
}

// oracle ----------------------------------------------------------------------

std::function<Record(std::optional<CsvWriter>&)> prepare_oracle(const Config& cfg) {
  const ModelParams p = model_params(cfg, true);
  const InitialCondition init = initial_condition(cfg);
  dense::DenseConfig dc;
  const std::string model = cfg.get_string("oracle", "model", p.is_htc() ? "htc" : "tc");
  if (model == "tc") {
    if (p.is_htc()) usage("oracle.model = tc requires model.huang_rhys = 0");
    dc.model = dense::Model::TC;
  } else if (model == "htc") {
    if (!(p.omega_nu > 0.0)) usage("oracle.model = htc requires model.omega_nu > 0");
    dc.model = dense::Model::HTC;
  } else {
    usage("unknown oracle.model '" + model + "' (tc | htc)");
  }
  dc.n_photon_levels = static_cast<int>(cfg.get_int("oracle", "photon_levels", 0));
  dc.n_vib_levels = static_cast<int>(cfg.get_int("oracle", "vib_levels", dc.n_vib_levels));
  dc.dimension_cap = cfg.get_int("oracle", "dimension_cap", dc.dimension_cap);
  const std::vector<double> grid = time_grid(cfg);
  dense::EvolveOptions opts;
  opts.ode.rtol = cfg.get_double("solver", "rtol", 1e-10);
  opts.ode.atol = cfg.get_double("solver", "atol", 1e-12);
  opts.ode.method = integrator(cfg.get_string("solver", "integrator", "dop853"));
  if (!(opts.ode.rtol > 0.0) || !(opts.ode.atol > 0.0)) usage("solver.rtol and solver.atol must be > 0");

  return [p, init, dc, grid, opts, model](std::optional<CsvWriter>& csv) {
    const dense::Trajectory tr = dense::evolve(p, dc, init, grid, opts);
    csv.emplace("oracle", std::vector<std::string>{"t_fs", "n_mean", "n_over_N", "sz", "coherence", "j2",
                                                    "b_occupation", "trace_residual"});
    const double n = p.n_emitters;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < tr.times_fs.size(); ++k) {
      csv->row(std::vector<double>{tr.times_fs[k], tr.photon_mean[k], tr.photon_mean[k] / n, tr.sz_mean[k],
                                   std::abs(tr.sigma_plus[k]), tr.j2[k],
                                   tr.b_occupation.empty() ? nan : tr.b_occupation[k], tr.trace_residual[k]});
    }
    Record r;
    r.solver = "dense-" + model + "-" + integrator_name(opts.ode.method);
    r.kind = "oracle";
    r.tolerances = {{"rtol", opts.ode.rtol}, {"atol", opts.ode.atol}};
    r.warnings = tr.warnings;
    double hermiticity = 0.0;
    for (double v : tr.hermiticity_residual) hermiticity = std::max(hermiticity, v);
    r.extra["max_hermiticity_residual"] = hermiticity;
    if (!tr.min_eigenvalue.empty()) {
      r.extra["min_eigenvalue"] = *std::min_element(tr.min_eigenvalue.begin(), tr.min_eigenvalue.end());
    }
    return r;
  };
}

// sweep -----------------------------------------------------------------------

std::function<Record(std::optional<CsvWriter>&)> prepare_sweep(const Config& cfg) {
  analysis::SweepSpec spec;
  spec.axis = analysis::parse_axis(cfg.get_string("sweep", "axis"));
  spec.values = cfg.get_list("sweep", "values");
  spec.solver = analysis::parse_solver(cfg.get_string("sweep", "solver"));
  spec.fit = cfg.get_bool("sweep", "fit", true);
  const long long jobs = cfg.get_int("sweep", "jobs", 1);
  spec.jobs = static_cast<int>(std::clamp<long long>(jobs, 0, 4096));
  spec.base = model_params(cfg);
  spec.init = initial_condition(cfg);
  spec.t_grid_fs = time_grid(cfg);
  const bool exact = spec.solver == analysis::Solver::PIBS;
  spec.rtol = cfg.get_double("solver", "rtol", exact ? 1e-8 : 1e-10);
  spec.atol = cfg.get_double("solver", "atol", exact ? 1e-10 : 1e-12);
  if (!(spec.rtol > 0.0) || !(spec.atol > 0.0)) usage("solver.rtol and solver.atol must be > 0");
  spec.window.lo = cfg.get_double("analysis", "window_lo", spec.window.lo);
  spec.window.hi = cfg.get_double("analysis", "window_hi", spec.window.hi);
  spec.window.r2_min = cfg.get_double("analysis", "r2_min", spec.window.r2_min);
  const long long min_points = cfg.get_int("analysis", "min_points", 4);
  if (min_points < 2) usage("analysis.min_points must be >= 2");
  spec.window.min_points = static_cast<std::size_t>(min_points);
  if (!(spec.window.lo > 0.0) || !(spec.window.hi > spec.window.lo)) {
    usage("analysis window needs 0 < window_lo < window_hi");
  }
  analysis::validate(spec);

  return [spec](std::optional<CsvWriter>& csv) {
    const auto points = analysis::run_sweep(spec);
    csv.emplace("sweep", std::vector<std::string>{"value", "tau_fs", "r2", "well_defined", "amplitude",
                                                   "window_start_fs", "window_end_fs", "peak_n_over_N",
                                                   "t_peak_fs", "t_onset_fs", "final_n_over_N", "error"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::size_t defined = 0, failed = 0;
    std::optional<std::size_t> best;
    Record r;
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto& pt = points[k];
      const bool ok = !pt.error;
      const bool fitted = ok && pt.fit.has_value();
      const bool good = fitted && pt.fit->well_defined;
      defined += good ? 1 : 0;
      failed += ok ? 0 : 1;
      if (good && (!best || pt.fit->tau_fs < points[*best].fit->tau_fs)) best = k;
      if (!ok) r.warnings.push_back("value " + format_number(pt.value) + ": " + pt.message);
      csv->row(std::vector<std::string>{
          format_number(pt.value), format_number(fitted ? pt.fit->tau_fs : nan),
          format_number(fitted ? pt.fit->r_squared : nan), good ? "1" : "0",
          format_number(fitted ? pt.fit->amplitude : nan),
          format_number(fitted ? pt.fit->window.t_start_fs : nan),
          format_number(fitted ? pt.fit->window.t_end_fs : nan), format_number(ok ? pt.peak_n_over_n : nan),
          format_number(ok ? pt.t_peak_fs : nan), format_number(ok ? pt.t_onset_fs : nan),
          format_number(ok ? pt.final_n_over_n : nan), ok ? "" : std::string(to_string(*pt.error))});
    }
    r.solver = "sweep-" + analysis::to_string(spec.solver);
    r.kind = "sweep";
    r.tolerances = {{"rtol", spec.rtol}, {"atol", spec.atol}};
    json summary = {{"axis", analysis::to_string(spec.axis)},
                    {"points", points.size()},
                    {"well_defined", defined},
                    {"failed", failed},
                    {"window", {{"lo", spec.window.lo}, {"hi", spec.window.hi}, {"r2_min", spec.window.r2_min},
                                {"min_points", spec.window.min_points}}}};
    if (best) {
      summary["tau_min_fs"] = points[*best].fit->tau_fs;
      summary["argmin_value"] = points[*best].value;
    }
    r.extra["summary"] = summary;
    return r;
  };
}

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("config", f.config_path, "configuration file")->required();
  cmd->add_option("--out-dir", f.out_dir, "output directory (overrides SUPERRAD_OUTPUT_DIR)");
  cmd->add_option("--name", f.name, "output file stem");
  cmd->add_option("--tmax", f.tmax, "final time in fs");
  cmd->add_option("--points", f.points, "number of output times");
  cmd->add_option("--rtol", f.rtol, "relative tolerance");
  cmd->add_option("--atol", f.atol, "absolute tolerance");
  cmd->add_option("--set", f.overrides, "override a config entry, section.key=value (repeatable)")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
}

}  // namespace

const std::map<std::string, std::set<std::string>>& config_schema() { return kSchema; }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Superradiance dynamics of emitters in a lossy cavity", "superrad"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SUPERRAD_VERSION);

  CommonFlags flags;
  std::string mode, integrator_flag, method, photon_levels, vib_levels, dimension_cap;
  std::string axis, values, solver, jobs, window_lo, window_hi, r2_min;
  bool fit_on = false;
  bool fit_off = false;

  auto* exact = app.add_subcommand("exact", "exact block solver (Tavis-Cummings)");
  add_common(exact, flags);
  exact->add_option("--mode", mode, "joint | sequential");
  exact->add_option("--integrator", integrator_flag, "dp45 | dop853 (joint mode)");

  auto* semi = app.add_subcommand("semiclassical", "mean-field or second-order cumulant equations");
  add_common(semi, flags);
  semi->add_option("--method", method, "mf | c2");
  semi->add_option("--integrator", integrator_flag, "dp45 | dop853");

  auto* oracle = app.add_subcommand("oracle", "brute-force density-matrix solver for small N");
  add_common(oracle, flags);
  oracle->add_option("--photon-levels", photon_levels, "photon truncation (0 = N + 1)");
  oracle->add_option("--vib-levels", vib_levels, "vibrational truncation");
  oracle->add_option("--dimension-cap", dimension_cap, "largest Hilbert dimension");
  oracle->add_option("--integrator", integrator_flag, "dp45 | dop853");

  auto* sweep = app.add_subcommand("sweep", "risetime sweep over S, gamma_phi, delta or theta");
  add_common(sweep, flags);
  sweep->add_option("--axis", axis, "S | gamma_phi | delta | theta");
  sweep->add_option("--values", values, "comma-separated axis values");
  sweep->add_option("--solver", solver, "mf | c2 | pibs");
  sweep->add_flag("--fit", fit_on, "fit risetimes (default)");
  sweep->add_flag("--no-fit", fit_off, "skip risetime fits")->excludes("--fit");
  sweep->add_option("--jobs", jobs, "parallel sweep points");
  sweep->add_option("--window-lo", window_lo, "lower photon band for the window");
  sweep->add_option("--window-hi", window_hi, "upper photon band for the window");
  sweep->add_option("--r2-min", r2_min, "minimum R^2 of the log-linear fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Invocation inv;
  inv.argv.assign(argv, argv + argc);
  inv.flags = flags;
  const auto set_if = [](Config& cfg, const char* section, const char* key, const std::string& v) {
    if (!v.empty()) cfg.set(section, key, v);
  };

  if (exact->parsed()) {
    inv.command = "exact";
    return run_command(inv, [&](Config& cfg) {
      set_if(cfg, "solver", "mode", mode);
      set_if(cfg, "solver", "integrator", integrator_flag);
    }, prepare_exact, out, err);
  }
  if (semi->parsed()) {
    inv.command = "semiclassical";
    return run_command(inv, [&](Config& cfg) {
      set_if(cfg, "semiclassical", "method", method);
      set_if(cfg, "solver", "integrator", integrator_flag);
    }, prepare_semiclassical, out, err);
  }
  if (oracle->parsed()) {
    inv.command = "oracle";
    return run_command(inv, [&](Config& cfg) {
      set_if(cfg, "oracle", "photon_levels", photon_levels);
      set_if(cfg, "oracle", "vib_levels", vib_levels);
      set_if(cfg, "oracle", "dimension_cap", dimension_cap);
      set_if(cfg, "solver", "integrator", integrator_flag);
    }, prepare_oracle, out, err);
  }
  inv.command = "sweep";
  return run_command(inv, [&](Config& cfg) {
    set_if(cfg, "sweep", "axis", axis);
    if (sweep->count("--values") > 0) cfg.set("sweep", "values", values.empty() ? " " : values);
    set_if(cfg, "sweep", "solver", solver);
    set_if(cfg, "sweep", "jobs", jobs);
    if (fit_on || fit_off) cfg.set("sweep", "fit", fit_on ? "true" : "false");
    set_if(cfg, "analysis", "window_lo", window_lo);
    set_if(cfg, "analysis", "window_hi", window_hi);
    set_if(cfg, "analysis", "r2_min", r2_min);
  }, prepare_sweep, out, err);
}

}  // namespace superrad::cli
