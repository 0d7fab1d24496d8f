#include "run.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>

#include "dicke/errors.hpp"
#include "dicke/io.hpp"
#include "dicke/observables.hpp"

#ifndef DICKE_VERSION
#define DICKE_VERSION "unknown"
#endif

namespace dicke::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Every result file is written from the orchestrating thread through this.
class Writer {
 public:
  Writer(fs::path dir, std::string hash) : dir_(std::move(dir)), hash_(std::move(hash)) {}
  const std::string& hash() const { return hash_; }
  fs::path path(const std::string& name) const { return dir_ / name; }
  template <class Fn>
  void csv(const std::string& name, Fn&& write) {
    std::lock_guard lock(mutex_);
    write(path(name), hash_);
    files_.push_back(path(name));
  }
  void json_file(const std::string& name, json doc) {
    std::lock_guard lock(mutex_);
    doc["config_hash"] = hash_;
    io::write_text_file(path(name), doc.dump(2) + "\n");
    files_.push_back(path(name));
  }
  void snapshot(const std::string& name, const QuantumState& state, const SystemParams& params) {
    std::lock_guard lock(mutex_);
    io::write_snapshot(path(name), state, params);
    files_.push_back(path(name));
  }
  std::vector<fs::path> files() const { return files_; }

 private:
  fs::path dir_;
  std::string hash_;
  std::mutex mutex_;
  std::vector<fs::path> files_;
};

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path probe = dir / ".write_probe";
  std::ofstream out(probe);
  if (ec || !out) throw ConfigError("output-dir " + dir.string() + " is not writable");
  out.close();
  fs::remove(probe, ec);
}

SystemParams resolved_params(SystemParams p, bool auto_n_max, double lambda_d) {
  if (auto_n_max) p.n_max = default_n_max(p.n_qubits, p.omega, lambda_d);
  return p;
}

SystemParams resolved_params(const RunConfig& c, double lambda_d) {
  return resolved_params(c.params, c.auto_n_max, lambda_d);
}

PropagationOptions propagation(const RunConfig& c) {
  PropagationOptions o;
  o.tol = c.tol;
  o.krylov_max_dim = c.krylov_dim;
  o.measure.pure_negativity = c.negativity;
  return o;
}

json to_json(const SolverReport& r) {
  return {{"steps", r.steps},
          {"rejected_steps", r.rejected_steps},
          {"error_estimate", r.error_estimate},
          {"max_tail_weight", r.max_tail_weight},
          {"initial_n_max", r.initial_n_max},
          {"final_n_max", r.final_n_max},
          {"extensions", r.extensions},
          {"max_krylov_dim", r.max_krylov_dim}};
}

json to_json(const Crossing& c) {
  if (!c.defined) return nullptr;
  return {{"upsilon", c.upsilon()}, {"log2_upsilon", c.log_upsilon / std::log(2.0)}};
}

json to_json(const ScalingFit& f) {
  if (!f.valid) return nullptr;
  return {{"exponent", f.slope},   {"intercept", f.intercept}, {"standard_error", f.standard_error},
          {"ci95_low", f.ci95_low}, {"ci95_high", f.ci95_high}, {"points", f.points}};
}

json metadata(const RunConfig& c, double wall_seconds) {
  return {{"config", to_json(c)}, {"code_version", DICKE_VERSION}, {"wall_time_s", wall_seconds}};
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool run_trajectory(const RunConfig& c, Writer& out, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const SystemParams params = resolved_params(c, c.schedule.lambda_d);
  const PropagationOptions options = propagation(c);
  log << to_string(c.mode) << ": N=" << params.n_qubits << " n_max=" << params.n_max
      << " log2(upsilon)=" << std::log2(c.schedule.upsilon) << " lambda_d=" << c.schedule.lambda_d << '\n';

  Trajectory traj;
  if (c.mode == Mode::lindblad) {
    traj = evolve_open(thermal_initial_state(params, *c.open), params, c.schedule, *c.open, options);
  } else {
    traj = evolve_pure(initial_state(params), params, c.schedule, options);
  }
  out.csv("trajectory.csv", [&](const fs::path& p, const std::string& h) { io::write_trajectory_csv(p, traj.records, h); });

  json meta = metadata(c, 0.0);
  meta["resolved_n_max"] = params.n_max;
  meta["solver"] = to_json(traj.report);
  meta["checkpoints"] = traj.records.size();
  if (!traj.records.empty()) meta["entropy_is_witness"] = traj.records.back().entropy_is_witness;

  bool converged = true;
  if (c.convergence_check && c.mode == Mode::evolve) {
    const ConvergenceReport conv = convergence_check(params, c.schedule, options);
    converged = conv.passed;
    meta["convergence"] = {{"passed", conv.passed},
                           {"max_entropy_deviation", conv.max_entropy_deviation},
                           {"n_max", conv.n_max},
                           {"refined_n_max", conv.refined_n_max},
                           {"tol", conv.tol}};
  } else if (c.convergence_check) {
    meta["convergence"] = "not available for open runs";
  }
  if (c.snapshot) out.snapshot("final_state.dksnap", traj.final_state, traj.params);
  meta["wall_time_s"] = elapsed(start);
  out.json_file("metadata.json", meta);
  return converged;
}

std::vector<SweepGrid> run_sweeps(const RunConfig& c, std::ostream& log) {
  std::vector<SweepGrid> grids;
  std::mutex log_mutex;
  for (int n : c.sweep->n_values) {
    SystemParams p = c.params;
    p.n_qubits = n;
    p = resolved_params(p, c.auto_n_max, c.schedule.lambda_d);
    SweepOptions options;
    options.propagation = propagation(c);
    options.threads = c.threads;
    options.progress = [&, n](size_t done, size_t total, double u) {
      std::lock_guard lock(log_mutex);
      log << "N=" << n << " [" << done << "/" << total << "] log2(upsilon)=" << std::log2(u) << '\n';
    };
    grids.push_back(velocity_sweep(p, c.sweep->upsilons(), c.schedule, c.sweep->measure, options));
  }
  return grids;
}

json sweep_summary(const std::vector<SweepGrid>& grids) {
  json rows = json::array();
  for (const SweepGrid& g : grids) {
    json contours = json::array();
    for (const EqualTimeContour& ct : g.contours) {
      json poly = json::array();
      for (const ContourPoint& pt : ct.polyline) poly.push_back({pt.log2_upsilon, pt.lambda});
      contours.push_back({{"t", ct.t}, {"polyline", poly}});
    }
    json reports = json::array();
    for (const SolverReport& r : g.reports) reports.push_back(to_json(r));
    rows.push_back({{"n_qubits", g.n_qubits},
                    {"upsilons", g.upsilon_values.size()},
                    {"checkpoints", g.lambda_checkpoints.size()},
                    {"measure", to_string(g.measure)},
                    {"equal_time_contours", contours},
                    {"solver", reports}});
  }
  return rows;
}

void run_sweep_mode(const RunConfig& c, Writer& out, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<SweepGrid> grids = run_sweeps(c, log);
  const char* csv_name = c.mode == Mode::sweep ? "sweep.csv" : "phase_diagram.csv";
  out.csv(csv_name, [&](const fs::path& p, const std::string& h) { io::write_sweep_csv(p, grids, h); });

  json meta = metadata(c, 0.0);
  meta["sweeps"] = sweep_summary(grids);
  if (c.mode == Mode::phase_diagram) {
    BoundaryOptions bo;
    bo.threshold = c.sweep->threshold;
    bo.smoothing_window = c.sweep->smoothing_window;
    bo.lambda_ds = c.sweep->lambda_ds;
    bo.quench_reference_n = c.sweep->quench_n;
    bo.lambda_c = critical_coupling(c.params);
    PhaseBoundary b = extract_boundaries(grids, bo);
    fit_scaling(b);
    json umin = json::array(), umax = json::array(), ulam = json::array();
    for (const auto& [n, x] : b.upsilon_min_of_n) umin.push_back({{"N", n}, {"edge", to_json(x)}});
    for (const auto& [n, x] : b.upsilon_max_of_n) umax.push_back({{"N", n}, {"edge", to_json(x)}});
    for (const auto& [l, x] : b.upsilon_max_of_lambda) ulam.push_back({{"lambda_d", l}, {"edge", to_json(x)}});
    json boundary = {{"threshold", b.threshold},
                     {"smoothing_window", b.smoothing_window},
                     {"lambda_c", b.lambda_c},
                     {"quench_reference_n", b.quench_reference_n},
                     {"upsilon_min_of_n", umin},
                     {"upsilon_max_of_n", umax},
                     {"upsilon_max_of_lambda", ulam},
                     {"fitted_exponents", {{"adiabatic", to_json(b.adiabatic)}, {"quench", to_json(b.quench)}}},
                     {"notes", b.notes}};
    out.json_file("boundary.json", boundary);
  }
  meta["wall_time_s"] = elapsed(start);
  out.json_file(c.mode == Mode::sweep ? "sweep.json" : "phase_diagram.json", meta);
}

void run_wigner(const RunConfig& c, Writer& out, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const SystemParams params = resolved_params(c, c.schedule.lambda_d);
  log << "wigner: evolving N=" << params.n_qubits << " to lambda_d=" << c.schedule.lambda_d << '\n';
  const Trajectory traj = evolve_pure(initial_state(params), params, c.schedule, propagation(c));

  const double beta = c.schedule.lambda_d * std::sqrt(double(params.n_qubits)) / params.omega;
  FieldWignerOptions fo = c.wigner.field_extent > 0.0
                              ? FieldWignerOptions{-c.wigner.field_extent, c.wigner.field_extent,
                                                   -c.wigner.field_extent, c.wigner.field_extent}
                              : default_field_window(beta);
  fo.nx = fo.np = c.wigner.field_points;
  fo.unit_integral = c.wigner.unit_integral;
  const PlanarWignerGrid field = field_wigner(reduce_field(traj.final_state), fo);
  const SphericalWignerGrid spin = agarwal_wigner(reduce_matter(traj.final_state), c.wigner.theta_points,
                                                  c.wigner.phi_points, c.wigner.phase);
  out.csv("field_wigner.csv", [&](const fs::path& p, const std::string& h) { io::write_field_wigner_csv(p, field, h); });
  out.csv("spin_wigner.csv", [&](const fs::path& p, const std::string& h) { io::write_spin_wigner_csv(p, spin, h); });
  if (c.snapshot) out.snapshot("final_state.dksnap", traj.final_state, traj.params);

  json meta = metadata(c, elapsed(start));
  meta["solver"] = to_json(traj.report);
  meta["field"] = {{"convention", field.convention_note},
                   {"x_range", {fo.x_min, fo.x_max}},
                   {"p_range", {fo.p_min, fo.p_max}},
                   {"max_imag_residue", field.max_imag_residue},
                   {"min", field.values.minCoeff()}};
  meta["spin"] = {{"phase", to_string(spin.phase)},
                  {"max_imag_residue", spin.max_imag_residue},
                  {"min", spin.values.minCoeff()}};
  out.json_file("wigner.json", meta);
}

void run_ground_state(const RunConfig& c, Writer& out, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const double lambda = c.schedule.lambda_d;
  const SystemParams params = resolved_params(c, lambda);
  log << "ground-state: N=" << params.n_qubits << " lambda=" << lambda << " sector=" << to_string(c.sector) << '\n';
  const GroundStateResult gs = ground_state(params, lambda, c.sector);
  const ObservableRecord rec = ObservableSet(params).measure(gs.state);
  if (c.snapshot) out.snapshot("ground_state.dksnap", gs.state, params);
  json meta = metadata(c, elapsed(start));
  meta["resolved_n_max"] = params.n_max;
  meta["ground_state"] = {{"lambda", lambda},
                          {"energy_0", gs.energy_0},
                          {"energy_1", gs.energy_1},
                          {"gap", gs.gap},
                          {"iterations", gs.iterations},
                          {"S_N", rec.entropy},
                          {"negativity", rec.negativity},
                          {"log_negativity", rec.log_negativity},
                          {"parity", rec.parity},
                          {"jx", rec.jx},
                          {"jz", rec.jz},
                          {"n_photons", rec.n_photons},
                          {"tail_weight", rec.tail_weight}};
  out.json_file("ground_state.json", meta);
}

}  // namespace

RunReport run(const RunConfig& config, std::ostream& log) {
  config.validate();
  ensure_writable(config.output_dir);
  Writer out(config.output_dir, config_hash(config));
  RunReport report;
  switch (config.mode) {
    case Mode::evolve:
    case Mode::lindblad:
      report.converged = run_trajectory(config, out, log);
      break;
    case Mode::sweep:
    case Mode::phase_diagram:
      run_sweep_mode(config, out, log);
      break;
    case Mode::wigner:
      run_wigner(config, out, log);
      break;
    case Mode::ground_state:
      run_ground_state(config, out, log);
      break;
  }
  report.files = out.files();
  return report;
}

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ConvergenceError& e) {
    err << "convergence error: " << e.what() << '\n';
    return kConvergence;
  } catch (const PositivityError& e) {
    err << "positivity error: " << e.what() << '\n';
    return kConvergence;
  } catch (const TruncationError& e) {
    err << "truncation error: " << e.what() << " (tail weight " << e.tail_weight() << ")\n";
    return kTruncation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace dicke::cli
