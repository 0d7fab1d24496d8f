#pragma once

// Snapshots of quantum states and plot-ready CSV output. Every file written
// here carries the hash of the configuration that produced it.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dicke/observables.hpp"
#include "dicke/state.hpp"
#include "dicke/sweep.hpp"
#include "dicke/wigner.hpp"

namespace dicke::io {

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// Hash of the fields that fix the Hilbert space and Hamiltonian.
std::uint64_t params_hash(const SystemParams& params);

// Shortest round-trip decimal form ("%.17g" trimmed), locale independent.
std::string format_double(double value);

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct SnapshotInfo {
  std::uint32_t version = 0;
  std::uint64_t params_hash = 0;
  double t = 0.0;
  double lambda = 0.0;
  StateKind kind = StateKind::pure;
  int spin_dim = 0;
  int fock_dim = 0;
};

// Layout (all little-endian): "DKSNAP\0\0", u32 version, u64 params hash,
// f64 t, f64 lambda, u8 kind, u32 spin_dim, u32 fock_dim, u64 count,
// count complex values as (re, im) f64 pairs, u32 crc32 of everything before.
void write_snapshot(const std::filesystem::path& path, const QuantumState& state,
                    const SystemParams& params);
// Throws SnapshotError on bad magic, version, checksum, or a short file.
QuantumState read_snapshot(const std::filesystem::path& path, SnapshotInfo* info = nullptr);
// Also refuses a snapshot written for different parameters.
QuantumState read_snapshot(const std::filesystem::path& path, const SystemParams& expected);

// First line of every CSV: "# config_hash=<hex>".
std::string read_csv_config_hash(const std::filesystem::path& path);

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<ObservableRecord>& records,
                          const std::string& config_hash);

void write_field_wigner_csv(const std::filesystem::path& path, const PlanarWignerGrid& grid,
                            const std::string& config_hash);
void write_spin_wigner_csv(const std::filesystem::path& path, const SphericalWignerGrid& grid,
                           const std::string& config_hash);

// Long format: N, log2_upsilon, lambda, S_N, logneg.
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepGrid>& sweeps,
                     const std::string& config_hash);

// Concatenates sweep CSVs; throws ConfigError unless every file carries the
// same config hash.
void merge_sweep_csvs(const std::vector<std::filesystem::path>& inputs,
                      const std::filesystem::path& output);

// Writes via a temporary file and rename.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dicke::io
