#include "dicke/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "dicke/errors.hpp"

namespace dicke {

std::string to_string(SweepMeasure measure) {
  return measure == SweepMeasure::entropy ? "entropy" : "logneg";
}

SweepMeasure sweep_measure_from_string(const std::string& name) {
  if (name == "entropy") return SweepMeasure::entropy;
  if (name == "logneg") return SweepMeasure::logneg;
  throw ConfigError("unknown sweep measure '" + name + "' (expected entropy or logneg)");
}

Index SweepGrid::lambda_index(double lambda) const {
  for (size_t k = 0; k < lambda_checkpoints.size(); ++k)
    if (std::abs(lambda_checkpoints[k] - lambda) <= 1e-9 * std::max(1.0, std::abs(lambda)))
      return static_cast<Index>(k);
  std::ostringstream msg;
  msg << "lambda " << lambda << " is not a checkpoint of the N=" << n_qubits << " sweep";
  throw std::invalid_argument(msg.str());
}

namespace {

std::string row_label(double upsilon) {
  std::ostringstream s;
  s.precision(6);
  s << "sweep row upsilon=" << upsilon << " (log2 " << std::log2(upsilon) << "): ";
  return s.str();
}

[[noreturn]] void rethrow_for_row(std::exception_ptr error, double upsilon) {
  const std::string label = row_label(upsilon);
  try {
    std::rethrow_exception(error);
  } catch (const TruncationError& e) {
    throw TruncationError(label + e.what(), e.tail_weight());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(label + e.what());
  } catch (const PositivityError& e) {
    throw PositivityError(label + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(label + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(label + e.what());
  } catch (const std::exception& e) {
    throw Error(label + e.what());
  }
}

}  // namespace

SweepGrid velocity_sweep(const SystemParams& params, const std::vector<double>& upsilons,
                         const RampSchedule& schedule_template, SweepMeasure measure,
                         const SweepOptions& options) {
  params.validate();
  if (upsilons.empty()) throw std::invalid_argument("velocity_sweep: no velocities");
  for (size_t i = 0; i < upsilons.size(); ++i) {
    if (!(upsilons[i] > 0.0)) throw std::invalid_argument("velocity_sweep: velocities must be > 0");
    if (i > 0 && !(upsilons[i] > upsilons[i - 1]))
      throw std::invalid_argument("velocity_sweep: velocities must be strictly ascending");
  }

  RampSchedule base = schedule_template;
  base.lambda_start = 0.0;
  base.upsilon = upsilons.front();
  base.validate();

  SweepGrid grid;
  grid.n_qubits = params.n_qubits;
  grid.measure = measure;
  grid.upsilon_values = upsilons;
  grid.lambda_checkpoints = base.checkpoint_lambdas();

  const size_t rows = upsilons.size();
  const Index cols = static_cast<Index>(grid.lambda_checkpoints.size());
  grid.entropy = RMatrix::Zero(static_cast<Index>(rows), cols);
  grid.log_negativity = RMatrix::Zero(static_cast<Index>(rows), cols);
  grid.reports.resize(rows);

  const QuantumState psi0 = initial_state(params);
  std::vector<std::exception_ptr> errors(rows);
  std::atomic<size_t> next{0};
  std::atomic<size_t> done{0};
  std::mutex progress_mutex;

  auto worker = [&]() {
    for (size_t i = next++; i < rows; i = next++) {
      try {
        RampSchedule schedule = base;
        schedule.upsilon = upsilons[i];
        const Trajectory traj = evolve_pure(psi0, params, schedule, options.propagation);
        if (static_cast<Index>(traj.records.size()) != cols)
          throw Error("checkpoint count differs from the shared grid");
        for (Index k = 0; k < cols; ++k) {
          grid.entropy(static_cast<Index>(i), k) = traj.records[k].entropy;
          grid.log_negativity(static_cast<Index>(i), k) = traj.records[k].log_negativity;
        }
        grid.reports[i] = traj.report;
      } catch (...) {
        errors[i] = std::current_exception();
      }
      const size_t finished = ++done;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(finished, rows, upsilons[i]);
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(rows));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  }

  for (size_t i = 0; i < rows; ++i)
    if (errors[i]) rethrow_for_row(errors[i], upsilons[i]);

  grid.contours = equal_time_contours(upsilons, grid.lambda_checkpoints, options.contour_times);
  return grid;
}

std::vector<double> log2_spaced(double log2_lo, double log2_hi, int count) {
  if (count < 1) throw std::invalid_argument("log2_spaced: count must be >= 1");
  if (count == 1) return {std::exp2(log2_lo)};
  if (!(log2_hi > log2_lo)) throw std::invalid_argument("log2_spaced: need hi > lo");
  std::vector<double> out(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k)
    out[k] = std::exp2(log2_lo + (log2_hi - log2_lo) * k / (count - 1));
  return out;
}

std::vector<EqualTimeContour> equal_time_contours(const std::vector<double>& upsilons,
                                                  const std::vector<double>& lambdas,
                                                  const std::vector<double>& times) {
  std::vector<EqualTimeContour> out;
  if (lambdas.empty()) return out;
  const double lo = lambdas.front();
  const double hi = lambdas.back();
  for (double t : times) {
    EqualTimeContour contour{t, {}};
    for (double u : upsilons) {
      const double lambda = u * t;
      if (lambda >= lo && lambda <= hi) contour.polyline.push_back({std::log2(u), lambda});
    }
    out.push_back(std::move(contour));
  }
  return out;
}

std::vector<double> smooth_centered(const std::vector<double>& values, int window) {
  if (window < 1) throw std::invalid_argument("smooth_centered: window must be >= 1");
  const long n = static_cast<long>(values.size());
  const long half = window / 2;
  std::vector<double> out(values.size());
  for (long i = 0; i < n; ++i) {
    const long reach = std::min({half, i, n - 1 - i});
    double sum = 0.0;
    for (long j = i - reach; j <= i + reach; ++j) sum += values[j];
    out[i] = sum / static_cast<double>(2 * reach + 1);
  }
  return out;
}

CrossingPair find_crossings(const std::vector<double>& upsilons, const std::vector<double>& values,
                            double threshold) {
  if (upsilons.size() != values.size())
    throw std::invalid_argument("find_crossings: size mismatch");
  CrossingPair out;
  const size_t n = values.size();
  auto locate = [&](size_t i) {
    const double x0 = std::log(upsilons[i - 1]);
    const double x1 = std::log(upsilons[i]);
    const double y0 = values[i - 1];
    const double y1 = values[i];
    const double f = (threshold - y0) / (y1 - y0);
    return Crossing{true, x0 + f * (x1 - x0)};
  };
  size_t start = 1;
  for (size_t i = 1; i < n; ++i) {
    if (values[i - 1] < threshold && values[i] >= threshold) {
      out.up = locate(i);
      start = i + 1;
      break;
    }
  }
  for (size_t i = start; i < n; ++i) {
    if (values[i - 1] >= threshold && values[i] < threshold) {
      out.down = locate(i);
      break;
    }
  }
  return out;
}

ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  const size_t n = x.size();
  if (n < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
  std::vector<double> lx(n), ly(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("fit_power_law: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) mx += lx[i], my += ly[i];
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_power_law: x values are all equal");

  ScalingFit fit;
  fit.valid = true;
  fit.points = static_cast<int>(n);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    ssr += r * r;
  }
  const double dof = static_cast<double>(n - 2);
  fit.standard_error = std::sqrt(ssr / dof / sxx);
  const boost::math::students_t dist(dof);
  const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.ci95_low = fit.slope - q * fit.standard_error;
  fit.ci95_high = fit.slope + q * fit.standard_error;
  return fit;
}

PhaseBoundary extract_boundaries(const std::vector<SweepGrid>& sweeps, const BoundaryOptions& options) {
  if (sweeps.empty()) throw std::invalid_argument("extract_boundaries: no sweeps");
  if (!(options.threshold > std::log(2.0)))
    throw std::invalid_argument("extract_boundaries: threshold must exceed log 2");

  PhaseBoundary b;
  b.threshold = options.threshold;
  b.smoothing_window = options.smoothing_window;
  b.lambda_c = options.lambda_c;

  auto column = [&](const SweepGrid& g, Index k) {
    const RMatrix& m = g.primary();
    std::vector<double> v(static_cast<size_t>(m.rows()));
    for (Index i = 0; i < m.rows(); ++i) v[i] = m(i, k);
    return smooth_centered(v, options.smoothing_window);
  };
  auto note = [&](std::ostringstream& s) { b.notes.push_back(s.str()); };

  for (const SweepGrid& g : sweeps) {
    const Index last = static_cast<Index>(g.lambda_checkpoints.size()) - 1;
    const CrossingPair c = find_crossings(g.upsilon_values, column(g, last), options.threshold);
    b.upsilon_min_of_n.emplace_back(g.n_qubits, c.up);
    b.upsilon_max_of_n.emplace_back(g.n_qubits, c.down);
    if (!c.up.defined) {
      std::ostringstream s;
      s << "N=" << g.n_qubits << ": adiabatic edge undefined (threshold never crossed upward)";
      note(s);
    }
    if (!c.down.defined) {
      std::ostringstream s;
      s << "N=" << g.n_qubits << ": quench edge undefined at lambda_d=" << g.lambda_checkpoints.back();
      note(s);
    }
    if (c.up.defined && c.down.defined && !(c.up.log_upsilon < c.down.log_upsilon)) {
      std::ostringstream s;
      s << "N=" << g.n_qubits << ": upsilon_min >= upsilon_max";
      note(s);
    }
  }

  const SweepGrid* ref = &sweeps.front();
  if (options.quench_reference_n != 0) {
    auto it = std::find_if(sweeps.begin(), sweeps.end(),
                           [&](const SweepGrid& g) { return g.n_qubits == options.quench_reference_n; });
    if (it == sweeps.end())
      throw std::invalid_argument("extract_boundaries: no sweep for the quench reference N");
    ref = &*it;
  }
  b.quench_reference_n = ref->n_qubits;
  for (double lambda_d : options.lambda_ds) {
    const CrossingPair c =
        find_crossings(ref->upsilon_values, column(*ref, ref->lambda_index(lambda_d)), options.threshold);
    b.upsilon_max_of_lambda.emplace_back(lambda_d, c.down);
    if (!c.down.defined) {
      std::ostringstream s;
      s << "N=" << ref->n_qubits << ": quench edge undefined at lambda_d=" << lambda_d;
      note(s);
    }
  }
  return b;
}

void fit_scaling(PhaseBoundary& boundary) {
  std::vector<double> x, y;
  for (const auto& [n, c] : boundary.upsilon_min_of_n)
    if (c.defined) x.push_back(n), y.push_back(c.upsilon());
  if (x.size() >= 3) {
    boundary.adiabatic = fit_power_law(x, y);
  } else {
    boundary.adiabatic = {};
    boundary.notes.push_back("adiabatic fit skipped: " + std::to_string(x.size()) + " defined points");
  }

  x.clear();
  y.clear();
  for (const auto& [lambda_d, c] : boundary.upsilon_max_of_lambda)
    if (c.defined && lambda_d > boundary.lambda_c)
      x.push_back(lambda_d - boundary.lambda_c), y.push_back(c.upsilon());
  if (x.size() >= 3) {
    boundary.quench = fit_power_law(x, y);
  } else {
    boundary.quench = {};
    boundary.notes.push_back("quench fit skipped: " + std::to_string(x.size()) + " defined points");
  }
}

double pearson_correlation(const RMatrix& a, const RMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.size() < 2)
    throw std::invalid_argument("pearson_correlation: grids must share a shape with >= 2 cells");
  const double ma = a.mean();
  const double mb = b.mean();
  const RMatrix da = a.array() - ma;
  const RMatrix db = b.array() - mb;
  const double denom = std::sqrt(da.squaredNorm() * db.squaredNorm());
  if (!(denom > 0.0)) throw std::invalid_argument("pearson_correlation: constant grid");
  return (da.array() * db.array()).sum() / denom;
}

}  // namespace dicke
