#include "config.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dicke/errors.hpp"
#include "dicke/io.hpp"

namespace dicke::cli {

namespace {

constexpr std::pair<Mode, const char*> kModes[] = {
    {Mode::evolve, "evolve"},         {Mode::lindblad, "lindblad"}, {Mode::sweep, "sweep"},
    {Mode::phase_diagram, "phase-diagram"}, {Mode::wigner, "wigner"}, {Mode::ground_state, "ground-state"},
};

template <class T>
std::string fmt(T v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

void require(bool ok, const std::string& field, const std::string& rule, const std::string& got) {
  if (!ok) throw ConfigError(field + " " + rule + " (got " + got + ")");
}

}  // namespace

std::string to_string(Mode mode) {
  for (auto [m, name] : kModes)
    if (m == mode) return name;
  return "?";
}

Mode mode_from_string(const std::string& name) {
  for (auto [m, n] : kModes)
    if (name == n) return m;
  throw ConfigError("unknown mode '" + name + "'");
}

void RunConfig::validate() const {
  require(params.n_qubits >= 1, "n-qubits", "must be >= 1", fmt(params.n_qubits));
  require(params.epsilon > 0.0, "epsilon", "must be > 0", fmt(params.epsilon));
  require(params.omega > 0.0, "omega", "must be > 0", fmt(params.omega));
  require(auto_n_max || params.n_max >= 1, "n-max", "must be >= 1 or 0 for automatic", fmt(params.n_max));
  require(schedule.upsilon > 0.0, "upsilon", "must be > 0", fmt(schedule.upsilon));
  require(schedule.lambda_d > 0.0, "lambda-d", "must be > 0", fmt(schedule.lambda_d));
  require(schedule.checkpoint_dlambda > 0.0, "dlambda", "must be > 0", fmt(schedule.checkpoint_dlambda));
  require(tol > 0.0 && tol < 1.0, "tol", "must lie in (0, 1)", fmt(tol));
  require(krylov_dim >= 4, "krylov-dim", "must be >= 4", fmt(krylov_dim));
  if (open) {
    require(open->kappa >= 0.0, "kappa", "must be >= 0", fmt(open->kappa));
    require(open->nbar >= 0.0, "nbar", "must be >= 0", fmt(open->nbar));
  }
  if (sweep) {
    require(sweep->count >= 1, "sweep-count", "must be >= 1", fmt(sweep->count));
    require(sweep->count == 1 || sweep->log2_max > sweep->log2_min, "sweep-log2-max",
            "must exceed sweep-log2-min", fmt(sweep->log2_max));
    for (int n : sweep->n_values) require(n >= 1, "sweep-n", "entries must be >= 1", fmt(n));
    for (double l : sweep->lambda_ds) require(l > 0.0, "sweep-lambda-d", "entries must be > 0", fmt(l));
    require(sweep->threshold > std::log(2.0), "threshold", "must exceed log 2", fmt(sweep->threshold));
    require(sweep->smoothing_window >= 1, "smoothing-window", "must be >= 1", fmt(sweep->smoothing_window));
    if (mode == Mode::phase_diagram && schedule.checkpoint_dlambda > 0.0) {
      double end = schedule.lambda_d;
      for (double l : sweep->lambda_ds) end = std::max(end, l);
      const std::vector<double> grid = make_ramp(1.0, end, schedule.checkpoint_dlambda).checkpoint_lambdas();
      for (double l : sweep->lambda_ds)
        require(std::any_of(grid.begin(), grid.end(), [l](double g) { return std::abs(g - l) <= 1e-9 * std::max(1.0, l); }),
                "sweep-lambda-d", "entries must be checkpoints (multiples of dlambda)", fmt(l));
    }
  }
  require(wigner.theta_points >= 2, "wigner-theta-points", "must be >= 2", fmt(wigner.theta_points));
  require(wigner.phi_points >= 2, "wigner-phi-points", "must be >= 2", fmt(wigner.phi_points));
  require(wigner.field_points >= 2, "field-points", "must be >= 2", fmt(wigner.field_points));
  require(wigner.field_extent >= 0.0, "field-extent", "must be >= 0", fmt(wigner.field_extent));
  require(!output_dir.empty(), "output-dir", "must not be empty", "''");
}

std::optional<RunConfig> parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Driven Dicke model simulator", "dicke"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "Key = value config file; flags override it");

  RunConfig cfg;
  cfg.params.n_max = 0;
  std::string mode;
  std::string log_base = "natural";
  std::optional<double> upsilon, upsilon_log2;
  double kappa = 0.0, nbar = 0.0;
  SweepSpec sweep;
  std::string measure = "entropy", phase = "standard", sector = "even", route = "partial-transpose";
  std::string output_dir = cfg.output_dir.string();

  app.add_option("mode,--mode", mode, "evolve | lindblad | sweep | phase-diagram | wigner | ground-state");
  app.add_option("-N,--n-qubits", cfg.params.n_qubits, "Number of qubits");
  app.add_option("--epsilon", cfg.params.epsilon, "Qubit splitting");
  app.add_option("--omega", cfg.params.omega, "Field frequency");
  app.add_option("--n-max", cfg.params.n_max, "Highest Fock level (0: automatic)");
  app.add_option("--entropy-log-base", log_base, "natural | base2");
  app.add_option("--upsilon", upsilon, "Annealing velocity");
  app.add_option("--upsilon-log2", upsilon_log2, "log2 of the annealing velocity");
  app.add_option("--lambda-d", cfg.schedule.lambda_d, "Final coupling");
  app.add_option("--dlambda", cfg.schedule.checkpoint_dlambda, "Checkpoint spacing in lambda");
  app.add_option("--kappa", kappa, "Cavity decay rate (lindblad)");
  app.add_option("--nbar", nbar, "Thermal photon number (lindblad)");
  app.add_option("--sweep-log2-min", sweep.log2_min, "Lowest log2 velocity");
  app.add_option("--sweep-log2-max", sweep.log2_max, "Highest log2 velocity");
  app.add_option("--sweep-count", sweep.count, "Number of velocities");
  app.add_option("--sweep-n", sweep.n_values, "Qubit numbers")->delimiter(',');
  app.add_option("--sweep-lambda-d", sweep.lambda_ds, "Quench-edge targets")->delimiter(',');
  app.add_option("--quench-n", sweep.quench_n, "Sweep used for the quench edge (0: first)");
  app.add_option("--measure", measure, "entropy | logneg");
  app.add_option("--threshold", sweep.threshold, "Boundary threshold on the measure");
  app.add_option("--smoothing-window", sweep.smoothing_window, "Moving-average window in grid points");
  app.add_option("--wigner-theta-points", cfg.wigner.theta_points);
  app.add_option("--wigner-phi-points", cfg.wigner.phi_points);
  app.add_option("--field-extent", cfg.wigner.field_extent, "Half-width of the x, p window (0: automatic)");
  app.add_option("--field-points", cfg.wigner.field_points);
  app.add_flag("--unit-integral", cfg.wigner.unit_integral, "Scale W by 2/pi");
  app.add_option("--multipole-phase", phase, "standard | multipole_index");
  app.add_option("--sector", sector, "even | odd | full (ground-state)");
  app.add_option("-o,--output-dir", output_dir)->envname("DICKE_OUTPUT_DIR");
  app.add_option("--seed", cfg.seed);
  app.add_option("--tol", cfg.tol, "Local error tolerance per unit time");
  app.add_option("--krylov-dim", cfg.krylov_dim);
  app.add_option("-j,--threads", cfg.threads, "Worker threads (0: all cores)");
  app.add_flag("--snapshot", cfg.snapshot, "Write the final state");
  app.add_flag("--convergence-check", cfg.convergence_check, "Repeat with tighter tolerance and cutoff");
  app.add_option("--negativity", route, "partial-transpose | schmidt (pure runs)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  if (mode.empty()) throw ConfigError("mode is required");
  cfg.mode = mode_from_string(mode);
  cfg.params.entropy_log_base = log_base_from_string(log_base);
  cfg.auto_n_max = cfg.params.n_max == 0;

  if (upsilon && upsilon_log2) throw ConfigError("give upsilon or upsilon-log2, not both");
  if (upsilon_log2) cfg.schedule.upsilon = std::exp2(*upsilon_log2);
  if (upsilon) cfg.schedule.upsilon = *upsilon;

  if (cfg.mode == Mode::lindblad) cfg.open = OpenSystemParams{kappa, nbar};
  else if (kappa != 0.0 || nbar != 0.0) throw ConfigError("kappa and nbar apply to lindblad mode only");

  try {
    sweep.measure = sweep_measure_from_string(measure);
    cfg.wigner.phase = multipole_phase_from_string(phase);
    cfg.sector = parity_sector_from_string(sector);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (route == "partial-transpose") cfg.negativity = NegativityRoute::partial_transpose;
  else if (route == "schmidt") cfg.negativity = NegativityRoute::schmidt;
  else throw ConfigError("unknown negativity route '" + route + "'");

  if (cfg.mode == Mode::sweep || cfg.mode == Mode::phase_diagram) {
    if (sweep.n_values.empty())
      sweep.n_values = cfg.mode == Mode::sweep ? std::vector<int>{cfg.params.n_qubits} : std::vector<int>{9, 15, 21};
    if (cfg.mode == Mode::phase_diagram && sweep.lambda_ds.empty()) sweep.lambda_ds = {0.8, 1.1, 1.4, 1.7, 2.0};
    for (double l : sweep.lambda_ds) cfg.schedule.lambda_d = std::max(cfg.schedule.lambda_d, l);
    cfg.sweep = sweep;
  }
  cfg.output_dir = output_dir;
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["mode"] = to_string(c.mode);
  j["n_qubits"] = c.params.n_qubits;
  j["epsilon"] = c.params.epsilon;
  j["omega"] = c.params.omega;
  j["n_max"] = c.auto_n_max ? 0 : c.params.n_max;
  j["entropy_log_base"] = to_string(c.params.entropy_log_base);
  j["upsilon"] = c.schedule.upsilon;
  j["lambda_start"] = c.schedule.lambda_start;
  j["lambda_d"] = c.schedule.lambda_d;
  j["dlambda"] = c.schedule.checkpoint_dlambda;
  if (c.open) j["open"] = {{"kappa", c.open->kappa}, {"nbar", c.open->nbar}};
  if (c.sweep) {
    j["sweep"] = {{"log2_min", c.sweep->log2_min},
                  {"log2_max", c.sweep->log2_max},
                  {"count", c.sweep->count},
                  {"n_values", c.sweep->n_values},
                  {"lambda_ds", c.sweep->lambda_ds},
                  {"quench_n", c.sweep->quench_n},
                  {"measure", to_string(c.sweep->measure)},
                  {"threshold", c.sweep->threshold},
                  {"smoothing_window", c.sweep->smoothing_window}};
  }
  if (c.mode == Mode::wigner) {
    j["wigner"] = {{"theta_points", c.wigner.theta_points}, {"phi_points", c.wigner.phi_points},
                   {"field_extent", c.wigner.field_extent}, {"field_points", c.wigner.field_points},
                   {"unit_integral", c.wigner.unit_integral}, {"phase", to_string(c.wigner.phase)}};
  }
  if (c.mode == Mode::ground_state) j["sector"] = to_string(c.sector);
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["krylov_dim"] = c.krylov_dim;
  j["negativity"] = c.negativity == NegativityRoute::schmidt ? "schmidt" : "partial-transpose";
  j["convergence_check"] = c.convergence_check;
  return j;
}

std::string config_hash(const RunConfig& config) { return io::hex64(io::fnv1a64(to_json(config).dump())); }

}  // namespace dicke::cli
