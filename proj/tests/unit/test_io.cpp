#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <iterator>

#include "dicke/errors.hpp"
#include "dicke/io.hpp"
#include "oracles.hpp"

using namespace dicke;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dicke_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void dump(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary | std::ios::trunc) << bytes;
}

}  // namespace

TEST(Hashing, FnvAndHex) {
  EXPECT_EQ(io::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(io::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(io::hex64(0xabcULL), "0000000000000abc");
  const SystemParams a{5, 1.0, 1.0, 20}, b{5, 1.0, 1.0, 21};
  EXPECT_NE(io::params_hash(a), io::params_hash(b));
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(io::format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Snapshot, PureRoundTripIsBitExact) {
  const SystemParams p{3, 1.0, 1.0, 7};
  const QuantumState psi = QuantumState::pure(4, 8, oracle::random_state(32, 5), 1.25, 0.625);
  const fs::path f = scratch("pure.dksnap");
  io::write_snapshot(f, psi, p);
  io::SnapshotInfo info;
  const QuantumState back = io::read_snapshot(f, &info);
  EXPECT_TRUE(back == psi);
  EXPECT_EQ(back.time(), 1.25);
  EXPECT_EQ(back.lambda(), 0.625);
  EXPECT_EQ(info.version, io::kSnapshotVersion);
  EXPECT_EQ(info.kind, StateKind::pure);
  EXPECT_EQ(info.params_hash, io::params_hash(p));
  EXPECT_TRUE(io::read_snapshot(f, p) == psi);
}

TEST(Snapshot, DensityRoundTripKeepsHermiticity) {
  const SystemParams p{2, 1.0, 1.0, 4};
  const QuantumState rho = QuantumState::density(3, 5, oracle::random_density(15, 3, 6));
  const fs::path f = scratch("rho.dksnap");
  io::write_snapshot(f, rho, p);
  const QuantumState back = io::read_snapshot(f);
  EXPECT_TRUE(back == rho);
  const CMatrix& m = back.density_matrix();
  EXPECT_EQ((m - m.adjoint()).cwiseAbs().maxCoeff(), (rho.density_matrix() - rho.density_matrix().adjoint()).cwiseAbs().maxCoeff());
}

TEST(Snapshot, CorruptionIsDetected) {
  const SystemParams p{2, 1.0, 1.0, 4};
  const QuantumState psi = QuantumState::pure(3, 5, oracle::random_state(15, 1));
  const fs::path f = scratch("bad.dksnap");
  io::write_snapshot(f, psi, p);
  const std::string good = slurp(f);

  std::string flipped = good;
  flipped[good.size() / 2] ^= 0x10;
  dump(f, flipped);
  EXPECT_THROW(io::read_snapshot(f), SnapshotError);

  dump(f, good.substr(0, good.size() - 9));
  EXPECT_THROW(io::read_snapshot(f), SnapshotError);

  std::string magic = good;
  magic[0] = 'X';
  dump(f, magic);
  EXPECT_THROW(io::read_snapshot(f), SnapshotError);

  std::string version = good;
  version[8] = 2;
  dump(f, version);
  EXPECT_THROW(io::read_snapshot(f), SnapshotError);

  dump(f, good + "x");
  EXPECT_THROW(io::read_snapshot(f), SnapshotError);

  dump(f, good);
  EXPECT_THROW(io::read_snapshot(f, SystemParams{2, 1.0, 1.1, 4}), SnapshotError);
  EXPECT_THROW(io::read_snapshot(scratch("missing.dksnap")), SnapshotError);
}

TEST(Csv, HashLineAndHeader) {
  ObservableRecord r;
  r.t = 1.0;
  r.lambda = 0.5;
  r.entropy = 0.25;
  const fs::path f = scratch("traj.csv");
  io::write_trajectory_csv(f, {r, r}, "00ff");
  EXPECT_EQ(io::read_csv_config_hash(f), "00ff");
  const std::string text = slurp(f);
  EXPECT_EQ(text.rfind("# config_hash=00ff\nt,lambda,S_N,", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Csv, MergeRequiresMatchingHashes) {
  SweepGrid g;
  g.n_qubits = 3;
  g.upsilon_values = {0.5, 1.0};
  g.lambda_checkpoints = {0.0, 1.0};
  g.entropy = RMatrix::Constant(2, 2, 0.5);
  g.log_negativity = RMatrix::Zero(2, 2);
  const fs::path a = scratch("a.csv"), b = scratch("b.csv"), c = scratch("c.csv"), out = scratch("m.csv");
  io::write_sweep_csv(a, {g}, "11");
  g.n_qubits = 5;
  io::write_sweep_csv(b, {g}, "11");
  io::write_sweep_csv(c, {g}, "22");
  io::merge_sweep_csvs({a, b}, out);
  EXPECT_EQ(io::read_csv_config_hash(out), "11");
  const std::string merged = slurp(out);
  EXPECT_EQ(std::count(merged.begin(), merged.end(), '\n'), 2 + 8);
  EXPECT_THROW(io::merge_sweep_csvs({a, c}, out), ConfigError);
}
