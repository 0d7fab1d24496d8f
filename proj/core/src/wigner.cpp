#include "dicke/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

namespace dicke {

namespace {

int twice(double j, const char* name) {
  const double t = 2.0 * j;
  const double r = std::round(t);
  if (!std::isfinite(t) || std::abs(t - r) > 1e-9)
    throw std::invalid_argument(std::string("wigner_3j: ") + name + " is not a half-integer");
  return static_cast<int>(r);
}

struct Twice3j {
  int j1, j2, j3, m1, m2, m3;
};

Twice3j to_twice(double j1, double j2, double j3, double m1, double m2, double m3) {
  return {twice(j1, "j1"), twice(j2, "j2"), twice(j3, "j3"),
          twice(m1, "m1"), twice(m2, "m2"), twice(m3, "m3")};
}

bool selection_ok(const Twice3j& t) {
  const int js[3] = {t.j1, t.j2, t.j3};
  const int ms[3] = {t.m1, t.m2, t.m3};
  for (int i = 0; i < 3; ++i) {
    if (js[i] < 0 || std::abs(ms[i]) > js[i] || (js[i] + ms[i]) % 2 != 0) return false;
  }
  if (t.m1 + t.m2 + t.m3 != 0) return false;
  if (t.j3 > t.j1 + t.j2 || t.j3 < std::abs(t.j1 - t.j2)) return false;
  if ((t.j1 + t.j2 + t.j3) % 2 != 0) return false;
  return true;
}

mpz_class factorial(long n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return f;
}

// Racah's single-sum formula in exact rationals; t holds twice the arguments.
double racah_exact(const Twice3j& t) {
  const long a = (t.j1 + t.j2 - t.j3) / 2;
  const long b = (t.j1 - t.j2 + t.j3) / 2;
  const long c = (-t.j1 + t.j2 + t.j3) / 2;
  const long s = (t.j1 + t.j2 + t.j3) / 2;
  const long j1pm1 = (t.j1 + t.m1) / 2, j1mm1 = (t.j1 - t.m1) / 2;
  const long j2pm2 = (t.j2 + t.m2) / 2, j2mm2 = (t.j2 - t.m2) / 2;
  const long j3pm3 = (t.j3 + t.m3) / 2, j3mm3 = (t.j3 - t.m3) / 2;

  mpq_class sq(factorial(a) * factorial(b) * factorial(c) * factorial(j1pm1) * factorial(j1mm1) *
                   factorial(j2pm2) * factorial(j2mm2) * factorial(j3pm3) * factorial(j3mm3),
               factorial(s + 1));
  sq.canonicalize();

  // k runs where every factorial argument below is non-negative.
  const long x1 = (t.j3 - t.j2 + t.m1) / 2;  // j3 - j2 + m1
  const long x2 = (t.j3 - t.j1 - t.m2) / 2;  // j3 - j1 - m2
  const long k_min = std::max({0L, -x1, -x2});
  const long k_max = std::min({a, j1mm1, j2pm2});
  mpq_class sum = 0;
  for (long k = k_min; k <= k_max; ++k) {
    mpz_class den = factorial(k) * factorial(x1 + k) * factorial(x2 + k) * factorial(a - k) *
                    factorial(j1mm1 - k) * factorial(j2pm2 - k);
    mpq_class term(k % 2 == 0 ? 1 : -1, 1);
    term /= mpq_class(den);
    sum += term;
  }
  if (sum == 0) return 0.0;
  const mpq_class squared = sum * sum * sq;
  double value = std::sqrt(squared.get_d());
  if (sgn(sum) < 0) value = -value;
  // (-1)^(j1 - j2 - m3)
  const int phase = (t.j1 - t.j2 - t.m3) / 2;
  return (phase % 2 == 0) ? value : -value;
}

}  // namespace

double wigner_3j_exact(double j1, double j2, double j3, double m1, double m2, double m3) {
  const Twice3j t = to_twice(j1, j2, j3, m1, m2, m3);
  if (!selection_ok(t)) return 0.0;
  return racah_exact(t);
}

double Wigner3jRange::at(double j1) const {
  const double offset = j1 - j1_min;
  const long k = std::lround(offset);
  if (std::abs(offset - k) > 1e-9 || k < 0 || k >= values.size()) return 0.0;
  return values(k);
}

Wigner3jRange wigner_3j_range(double j2, double j3, double m2, double m3) {
  const int tj2 = twice(j2, "j2"), tj3 = twice(j3, "j3");
  const int tm2 = twice(m2, "m2"), tm3 = twice(m3, "m3");
  if (tj2 < 0 || tj3 < 0 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3 || (tj2 + tm2) % 2 != 0 ||
      (tj3 + tm3) % 2 != 0)
    throw std::invalid_argument("wigner_3j_range: invalid (j, m) pair");
  const double m1 = -(m2 + m3);
  Wigner3jRange out;
  out.j1_min = std::max(std::abs(j2 - j3), std::abs(m1));
  const double j_max = j2 + j3;
  if (out.j1_min > j_max) return out;
  const long n = std::lround(j_max - out.j1_min) + 1;
  out.values = RVector::Zero(n);
  const double jmin = out.j1_min;

  const auto a_coef = [&](double j) {
    const double d = j2 - j3;
    const double s = j2 + j3 + 1.0;
    return std::sqrt(std::max(0.0, (j * j - d * d) * (s * s - j * j) * (j * j - m1 * m1)));
  };
  const auto b_coef = [&](double j) {
    return -(2.0 * j + 1.0) *
           (j2 * (j2 + 1.0) * m1 - j3 * (j3 + 1.0) * m1 - j * (j + 1.0) * (m3 - m2));
  };
  constexpr double kBig = 1e150;

  RVector& f = out.values;
  f(0) = 1.0;
  long k_mid = n - 1;
  if (n > 1) {
    if (jmin == 0.0) {
      // j2 = j3, m1 = 0: (1 j j; 0 m -m) / (0 j j; 0 m -m) = m / sqrt(j (j + 1)).
      f(1) = m2 / std::sqrt(j2 * (j2 + 1.0));
    } else {
      f(1) = -b_coef(jmin) / (jmin * a_coef(jmin + 1.0));
    }
    // Forward from j1_min until |f| first turns down.
    for (long k = 1; k + 1 < n; ++k) {
      if (k >= 2 && std::abs(f(k)) < std::abs(f(k - 1))) {
        k_mid = k - 1;
        break;
      }
      const double j = jmin + k;
      f(k + 1) = -(b_coef(j) * f(k) + (j + 1.0) * a_coef(j) * f(k - 1)) / (j * a_coef(j + 1.0));
      if (std::abs(f(k + 1)) > kBig) f.head(k + 2) /= kBig;
    }
    if (k_mid < n - 1 && k_mid >= 1) {
      // Backward from j_max down to k_mid - 1, then match on the overlap.
      RVector g = RVector::Zero(n);
      g(n - 1) = 1.0;
      g(n - 2) = -b_coef(j_max) / ((j_max + 1.0) * a_coef(j_max));
      for (long k = n - 2; k >= k_mid; --k) {
        const double j = jmin + k;
        g(k - 1) = -(b_coef(j) * g(k) + j * a_coef(j + 1.0) * g(k + 1)) / ((j + 1.0) * a_coef(j));
        if (std::abs(g(k - 1)) > kBig) g.segment(k - 1, n - k + 1) /= kBig;
      }
      double fg = 0.0, gg = 0.0;
      for (long k = k_mid - 1; k <= std::min(k_mid + 1, n - 1); ++k) {
        fg += f(k) * g(k);
        gg += g(k) * g(k);
      }
      const double scale = fg / gg;
      for (long k = k_mid + 1; k < n; ++k) f(k) = scale * g(k);
    }
  }

  double norm = 0.0;
  for (long k = 0; k < n; ++k) norm += (2.0 * (jmin + k) + 1.0) * f(k) * f(k);
  f /= std::sqrt(norm);
  // Sign convention: (j2 + j3, j2, j3; m1, m2, m3) has sign (-1)^(j2 - j3 + m2 + m3).
  const long phase = std::lround(j2 - j3 + m2 + m3);
  const double want = (phase % 2 == 0) ? 1.0 : -1.0;
  if (f(n - 1) * want < 0.0) f = -f;
  return out;
}

double wigner_3j_recursive(double j1, double j2, double j3, double m1, double m2, double m3) {
  const Twice3j t = to_twice(j1, j2, j3, m1, m2, m3);
  if (!selection_ok(t)) return 0.0;
  return wigner_3j_range(j2, j3, m2, m3).at(j1);
}

double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3) {
  const Twice3j t = to_twice(j1, j2, j3, m1, m2, m3);
  if (!selection_ok(t)) return 0.0;
  if (std::max({j1, j2, j3}) < kExact3jLimit) return racah_exact(t);
  return wigner_3j_range(j2, j3, m2, m3).at(j1);
}

std::string to_string(MultipolePhase phase) {
  return phase == MultipolePhase::standard ? "standard" : "multipole_index";
}

MultipolePhase multipole_phase_from_string(const std::string& name) {
  if (name == "standard") return MultipolePhase::standard;
  if (name == "multipole_index") return MultipolePhase::multipole_index;
  throw std::invalid_argument("unknown multipole phase '" + name + "'");
}

const SparseOperator& MultipoleSet::at(int l, int m) const {
  const auto it = operators.find({l, m});
  if (it == operators.end()) throw std::out_of_range("multipole (l, m) out of range");
  return it->second;
}

MultipoleSet multipole_operators(int n_qubits, MultipolePhase phase) {
  if (n_qubits < 1) throw std::invalid_argument("multipole_operators: N must be >= 1");
  const double j = 0.5 * n_qubits;
  const int dim = n_qubits + 1;
  const bool exact = j < kExact3jLimit;

  std::map<std::pair<int, int>, std::vector<SparseEntry>> entries;
  // T_{l,m}(M, M') is nonzero only for M = M' + m.
  for (int row = 0; row < dim; ++row) {
    for (int col = 0; col < dim; ++col) {
      const double big_m = row - j, big_mp = col - j;
      const int m = row - col;
      // (j l j; -M m M') = (l j j; m M' -M) for every l in range.
      Wigner3jRange range;
      if (!exact) range = wigner_3j_range(j, j, big_mp, -big_m);
      for (int l = std::abs(m); l <= n_qubits; ++l) {
        const double w = exact ? wigner_3j_exact(j, l, j, -big_m, m, big_mp) : range.at(l);
        if (w == 0.0) continue;
        const double x = phase == MultipolePhase::standard ? big_m : static_cast<double>(m);
        const long p = std::lround(j - x);
        const double sign = (p % 2 == 0) ? 1.0 : -1.0;
        entries[{l, m}].push_back({row, col, Complex(sign * std::sqrt(2.0 * l + 1.0) * w, 0.0)});
      }
    }
  }

  MultipoleSet set;
  set.n_qubits = n_qubits;
  set.phase = phase;
  for (int l = 0; l <= n_qubits; ++l)
    for (int m = -l; m <= l; ++m) {
      auto& list = entries[{l, m}];
      std::sort(list.begin(), list.end(), [](const SparseEntry& a, const SparseEntry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
      });
      set.operators.emplace(std::make_pair(l, m), SparseOperator::from_entries(dim, list, false));
    }
  return set;
}

SphericalWignerGrid agarwal_wigner(const CMatrix& rho_q, int n_theta, int n_phi,
                                   MultipolePhase phase) {
  if (rho_q.rows() != rho_q.cols() || rho_q.rows() < 2)
    throw std::invalid_argument("agarwal_wigner: rho_q must be square with N >= 1");
  return agarwal_wigner(rho_q, multipole_operators(static_cast<int>(rho_q.rows()) - 1, phase),
                        n_theta, n_phi);
}

SphericalWignerGrid agarwal_wigner(const CMatrix& rho_q, const MultipoleSet& multipoles,
                                   int n_theta, int n_phi) {
  const int n = multipoles.n_qubits;
  if (rho_q.rows() != n + 1 || rho_q.cols() != n + 1)
    throw std::invalid_argument("agarwal_wigner: rho_q does not match the multipole set");
  if (n_theta < 2 || n_phi < 2) throw std::invalid_argument("agarwal_wigner: grid too small");

  // c_{l,m} = tr(rho T_{l,m}) = sum_ab T_ab rho_ba
  std::map<std::pair<int, int>, Complex> coeff;
  for (const auto& [key, op] : multipoles.operators) {
    Complex c = 0.0;
    for (Index r = 0; r < op.matrix().outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(op.matrix(), r); it; ++it)
        c += it.value() * rho_q(it.col(), it.row());
    coeff[key] = c;
  }

  SphericalWignerGrid grid;
  grid.phase = multipoles.phase;
  grid.theta_values = RVector::LinSpaced(n_theta, 0.0, kPi);
  grid.phi_values = RVector::LinSpaced(n_phi, 0.0, 2.0 * kPi);
  grid.values.resize(n_theta, n_phi);

  std::vector<Complex> a_m(static_cast<size_t>(2 * n + 1));
  for (int it = 0; it < n_theta; ++it) {
    const double theta = grid.theta_values(it);
    // A_m(theta) = sum_l c_{l,m} Y_{l,m}(theta, 0), Y_{l,-k} = (-1)^k conj(Y_{l,k}).
    std::fill(a_m.begin(), a_m.end(), Complex(0.0));
    for (int l = 0; l <= n; ++l)
      for (int k = 0; k <= l; ++k) {
        const double y = std::sph_legendre(static_cast<unsigned>(l), static_cast<unsigned>(k), theta);
        a_m[static_cast<size_t>(n + k)] += coeff[{l, k}] * y;
        if (k > 0) a_m[static_cast<size_t>(n - k)] += coeff[{l, -k}] * ((k % 2 == 0) ? y : -y);
      }
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = grid.phi_values(ip);
      Complex w = 0.0;
      for (int m = -n; m <= n; ++m) w += a_m[static_cast<size_t>(n + m)] * std::polar(1.0, m * phi);
      grid.values(it, ip) = w.real();
      grid.max_imag_residue = std::max(grid.max_imag_residue, std::abs(w.imag()));
    }
  }
  return grid;
}

FieldWignerOptions default_field_window(double beta_max) {
  const double w = std::max(4.0, 2.0 * std::abs(beta_max));
  FieldWignerOptions o;
  o.x_min = o.p_min = -w;
  o.x_max = o.p_max = w;
  return o;
}

namespace {

// Largest Fock index with population above 1e-20; coherences beyond it are
// bounded by sqrt(rho_mm rho_nn) and dropped.
int effective_fock_size(const CMatrix& rho_b) {
  int last = 0;
  for (Index n = 0; n < rho_b.rows(); ++n)
    if (std::abs(rho_b(n, n)) > 1e-20) last = static_cast<int>(n);
  return last + 1;
}

// Sum over the k-th superdiagonal, sum_m rho(m, m+k) <m+k| D P D^dag |m>, with
// the phase e^{ik arg(alpha)} left out. Uses
//   f_m = sqrt(m! / (m+k)!) B^{k/2} e^{-B/2} L_m^{(k)}(B),  B = 4 |alpha|^2,
// advanced forward in m; L_m^{(k)}(B) is the dominant solution of its
// recurrence, so this direction is stable for any B.
Complex diagonal_sum(const CMatrix& rho, int size, int k, double b) {
  if (b == 0.0 && k > 0) return 0.0;
  double log_scale = 0.5 * ((k == 0 ? 0.0 : k * std::log(b)) - b - std::lgamma(k + 1.0));
  double f_prev = 0.0, f = 1.0;
  Complex sum = rho(0, k);
  for (int m = 1; m + k < size; ++m) {
    const double next = ((2.0 * m - 1.0 + k - b) * f - std::sqrt((m - 1.0) * (m - 1.0 + k)) * f_prev) /
                        std::sqrt(static_cast<double>(m) * (m + k));
    f_prev = f;
    f = next;
    sum += ((m % 2) ? -1.0 : 1.0) * rho(m, m + k) * f;
    if (std::abs(f) > 1e100) {
      f *= 1e-100;
      f_prev *= 1e-100;
      sum *= 1e-100;
      log_scale += 100.0 * std::log(10.0);
    }
  }
  return sum * std::exp(log_scale);
}

Complex wigner_sum(const CMatrix& rho, int size, double x, double p) {
  const double b = 2.0 * (x * x + p * p);
  const double theta = std::atan2(p, x);
  Complex w = diagonal_sum(rho, size, 0, b);
  for (int k = 1; k < size; ++k)
    w += 2.0 * (std::polar(1.0, k * theta) * diagonal_sum(rho, size, k, b)).real();
  return w;
}

}  // namespace

double field_wigner_at(const CMatrix& rho_b, double x, double p) {
  if (rho_b.rows() != rho_b.cols() || rho_b.rows() < 1)
    throw std::invalid_argument("field_wigner: rho_b must be square");
  return wigner_sum(rho_b, effective_fock_size(rho_b), x, p).real();
}

PlanarWignerGrid field_wigner(const CMatrix& rho_b, const FieldWignerOptions& options) {
  if (rho_b.rows() != rho_b.cols() || rho_b.rows() < 2)
    throw std::invalid_argument("field_wigner: rho_b must be square with n_max >= 1");
  if (options.nx < 2 || options.np < 2 || !(options.x_max > options.x_min) ||
      !(options.p_max > options.p_min))
    throw std::invalid_argument("field_wigner: empty grid");
  const double reach = std::sqrt(2.0 * (rho_b.rows() - 1) + 1.0) + 3.0;
  const double extent = std::max({std::abs(options.x_min), std::abs(options.x_max),
                                   std::abs(options.p_min), std::abs(options.p_max)});
  if (extent > reach) {
    std::ostringstream msg;
    msg << "field_wigner: window half-width " << extent << " exceeds the phase-space reach "
        << reach << " of n_max=" << rho_b.rows() - 1;
    throw std::invalid_argument(msg.str());
  }

  PlanarWignerGrid grid;
  grid.x_values = RVector::LinSpaced(options.nx, options.x_min, options.x_max);
  grid.p_values = RVector::LinSpaced(options.np, options.p_min, options.p_max);
  grid.values.resize(options.nx, options.np);
  const double scale = options.unit_integral ? 2.0 / kPi : 1.0;
  grid.convention_note = options.unit_integral
                             ? "W = (2/pi) sum_n (-1)^n <n|D^dag(a) rho D(a)|n>, sqrt(2) a = x + i p"
                             : "W = sum_n (-1)^n <n|D^dag(a) rho D(a)|n>, sqrt(2) a = x + i p";

  const int size = effective_fock_size(rho_b);
  for (int ix = 0; ix < options.nx; ++ix)
    for (int ip = 0; ip < options.np; ++ip) {
      const Complex w = wigner_sum(rho_b, size, grid.x_values(ix), grid.p_values(ip));
      grid.values(ix, ip) = scale * w.real();
      grid.max_imag_residue = std::max(grid.max_imag_residue, std::abs(w.imag()));
    }
  return grid;
}

}  // namespace dicke
