#pragma once

// Velocity sweeps over the ramp, the (log upsilon) x lambda entropy grid, and
// the boundaries of the enhanced-entanglement regime with their scaling fits.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dicke/unitary.hpp"

namespace dicke {

enum class SweepMeasure { entropy, logneg };

std::string to_string(SweepMeasure measure);
SweepMeasure sweep_measure_from_string(const std::string& name);

struct ContourPoint {
  double log2_upsilon = 0.0;
  double lambda = 0.0;
};

// Points of the grid reached after the same elapsed time t, lambda = upsilon t.
struct EqualTimeContour {
  double t = 0.0;
  std::vector<ContourPoint> polyline;
};

struct SweepGrid {
  int n_qubits = 0;
  SweepMeasure measure = SweepMeasure::entropy;
  std::vector<double> upsilon_values;      // ascending
  std::vector<double> lambda_checkpoints;  // shared by every row
  RMatrix entropy;                         // (upsilon, lambda)
  RMatrix log_negativity;                  // (upsilon, lambda)
  std::vector<EqualTimeContour> contours;
  std::vector<SolverReport> reports;       // one per upsilon

  const RMatrix& primary() const { return measure == SweepMeasure::entropy ? entropy : log_negativity; }
  // Column index of a checkpoint; throws if lambda is not on the grid.
  Index lambda_index(double lambda) const;
};

struct SweepOptions {
  PropagationOptions propagation;
  std::vector<double> contour_times{2.0, 4.0, 8.0, 16.0};
  unsigned threads = 0;  // 0: hardware concurrency
  // Called from worker threads after each finished row.
  std::function<void(size_t done, size_t total, double upsilon)> progress;
};

// One pure trajectory per upsilon, all from the lambda = 0 ground state with
// the template's lambda_d and checkpoint spacing. Rows are assembled in
// upsilon order regardless of completion order. A failed row is rethrown
// with its upsilon in the message.
SweepGrid velocity_sweep(const SystemParams& params, const std::vector<double>& upsilons,
                         const RampSchedule& schedule_template,
                         SweepMeasure measure = SweepMeasure::entropy,
                         const SweepOptions& options = {});

// log2-spaced velocities, both ends included.
std::vector<double> log2_spaced(double log2_lo, double log2_hi, int count);

std::vector<EqualTimeContour> equal_time_contours(const std::vector<double>& upsilons,
                                                  const std::vector<double>& lambdas,
                                                  const std::vector<double>& times);

// Centered moving average with the window shrinking at the ends.
std::vector<double> smooth_centered(const std::vector<double>& values, int window);

struct Crossing {
  bool defined = false;
  double log_upsilon = std::nan("");  // natural log
  double upsilon() const { return std::exp(log_upsilon); }
};

// Threshold crossings of a curve sampled on ascending upsilons, located by
// linear interpolation in log upsilon. `up`: first cell where the curve rises
// to >= threshold. `down`: first fall below threshold after `up` (or from the
// start, if the curve never rises).
struct CrossingPair {
  Crossing up;
  Crossing down;
};
CrossingPair find_crossings(const std::vector<double>& upsilons, const std::vector<double>& values,
                            double threshold);

struct ScalingFit {
  bool valid = false;
  double slope = 0.0;
  double intercept = 0.0;
  double standard_error = 0.0;
  double ci95_low = 0.0, ci95_high = 0.0;
  int points = 0;
};

// Least squares of log y against log x. Throws std::invalid_argument for
// fewer than 3 points or non-positive values.
ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct PhaseBoundary {
  double threshold = std::log(2.0) + 0.05;
  int smoothing_window = 5;
  double lambda_c = 0.5;
  std::vector<std::pair<int, Crossing>> upsilon_min_of_n;       // adiabatic edge at lambda_d
  std::vector<std::pair<int, Crossing>> upsilon_max_of_n;       // quench edge at lambda_d
  int quench_reference_n = 0;
  std::vector<std::pair<double, Crossing>> upsilon_max_of_lambda;
  ScalingFit adiabatic;  // log upsilon_min vs log N
  ScalingFit quench;     // log upsilon_max vs log(lambda_d - lambda_c)
  std::vector<std::string> notes;
};

struct BoundaryOptions {
  double threshold = std::log(2.0) + 0.05;
  int smoothing_window = 5;
  // Targets for the quench edge, read off the reference sweep's checkpoints.
  std::vector<double> lambda_ds;
  int quench_reference_n = 0;  // 0: the first sweep
  double lambda_c = 0.5;
};

PhaseBoundary extract_boundaries(const std::vector<SweepGrid>& sweeps,
                                 const BoundaryOptions& options = {});

// Fills boundary.adiabatic and boundary.quench. A fit with fewer than 3
// defined points is left invalid and noted.
void fit_scaling(PhaseBoundary& boundary);

// Pearson correlation over all cells of two equally shaped grids.
double pearson_correlation(const RMatrix& a, const RMatrix& b);

}  // namespace dicke
