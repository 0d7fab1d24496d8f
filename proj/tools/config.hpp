#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dicke/hamiltonian.hpp"
#include "dicke/lindblad.hpp"
#include "dicke/sweep.hpp"
#include "dicke/wigner.hpp"

namespace dicke::cli {

enum class Mode { evolve, lindblad, sweep, phase_diagram, wigner, ground_state };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct SweepSpec {
  double log2_min = -10.0;
  double log2_max = 4.0;
  int count = 57;  // 0.25 steps in log2
  std::vector<int> n_values;         // empty: params.n_qubits
  std::vector<double> lambda_ds;     // quench-edge targets (phase-diagram)
  int quench_n = 0;                  // 0: first of n_values
  SweepMeasure measure = SweepMeasure::entropy;
  double threshold = std::log(2.0) + 0.05;
  int smoothing_window = 5;

  std::vector<double> upsilons() const { return log2_spaced(log2_min, log2_max, count); }
};

struct WignerSpec {
  int theta_points = 181;
  int phi_points = 361;
  double field_extent = 0.0;  // 0: from the coherent displacement at lambda_d
  int field_points = 201;
  bool unit_integral = false;
  MultipolePhase phase = MultipolePhase::standard;
};

struct RunConfig {
  Mode mode = Mode::evolve;
  SystemParams params;  // n_max is ignored while auto_n_max is set
  bool auto_n_max = true;
  RampSchedule schedule;
  std::optional<OpenSystemParams> open;
  std::optional<SweepSpec> sweep;
  WignerSpec wigner;
  ParitySector sector = ParitySector::even;
  std::filesystem::path output_dir = "dicke_out";
  std::uint64_t seed = 0;
  double tol = 1e-8;
  int krylov_dim = 40;
  unsigned threads = 0;
  bool snapshot = false;
  bool convergence_check = false;
  NegativityRoute negativity = NegativityRoute::partial_transpose;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Flags mirror the config keys; a config file given with --config is read
// first and flags override it. Unknown keys are errors. DICKE_OUTPUT_DIR
// overrides the output directory of a config file. Throws ConfigError.
// Returns std::nullopt after printing help.
std::optional<RunConfig> parse_config(const std::vector<std::string>& args);

// Every field that affects numeric output, in a canonical order.
nlohmann::json to_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

}  // namespace dicke::cli
