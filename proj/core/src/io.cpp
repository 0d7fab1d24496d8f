#include "dicke/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "dicke/errors.hpp"

namespace dicke::io {

static_assert(std::endian::native == std::endian::little, "snapshot encoding assumes a little-endian host");

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::uint64_t params_hash(const SystemParams& params) {
  std::string key = "N=" + std::to_string(params.n_qubits) + ";epsilon=" + format_double(params.epsilon) +
                    ";omega=" + format_double(params.omega) + ";n_max=" + std::to_string(params.n_max);
  return fnv1a64(key);
}

namespace {

constexpr char kMagic[8] = {'D', 'K', 'S', 'N', 'A', 'P', '\0', '\0'};

class Writer {
 public:
  template <class T>
  void put(const T& v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_raw(const void* p, size_t n) {
    const auto* c = static_cast<const char*>(p);
    bytes_.insert(bytes_.end(), c, c + n);
  }
  std::string& bytes() { return bytes_; }

 private:
  std::string bytes_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}
  template <class T>
  T get() {
    T v;
    get_raw(&v, sizeof(T));
    return v;
  }
  void get_raw(void* out, size_t n) {
    if (pos_ + n > bytes_.size()) throw SnapshotError("snapshot truncated");
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  size_t position() const { return pos_; }

 private:
  std::string_view bytes_;
  size_t pos_ = 0;
};

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open snapshot " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_csv(const std::filesystem::path& path, const std::string& config_hash) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "# config_hash=" << config_hash << '\n';
  return out;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const QuantumState& state,
                    const SystemParams& params) {
  Writer w;
  w.put_raw(kMagic, sizeof kMagic);
  w.put(kSnapshotVersion);
  w.put(params_hash(params));
  w.put(state.time());
  w.put(state.lambda());
  w.put(static_cast<std::uint8_t>(state.is_pure() ? 0 : 1));
  w.put(static_cast<std::uint32_t>(state.spin_dim()));
  w.put(static_cast<std::uint32_t>(state.fock_dim()));
  const Complex* data = state.is_pure() ? state.amplitudes().data() : state.density_matrix().data();
  const std::uint64_t count = state.is_pure() ? static_cast<std::uint64_t>(state.amplitudes().size())
                                              : static_cast<std::uint64_t>(state.density_matrix().size());
  w.put(count);
  w.put_raw(data, count * sizeof(Complex));
  w.put(crc_of(w.bytes()));
  write_text_file(path, w.bytes());
}

QuantumState read_snapshot(const std::filesystem::path& path, SnapshotInfo* info) {
  const std::string bytes = slurp(path);
  Reader r(bytes);
  char magic[8];
  r.get_raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw SnapshotError("not a snapshot (bad magic)");
  SnapshotInfo meta;
  meta.version = r.get<std::uint32_t>();
  if (meta.version != kSnapshotVersion)
    throw SnapshotError("snapshot version " + std::to_string(meta.version) + " is not supported");
  meta.params_hash = r.get<std::uint64_t>();
  meta.t = r.get<double>();
  meta.lambda = r.get<double>();
  const auto kind = r.get<std::uint8_t>();
  if (kind > 1) throw SnapshotError("snapshot has an unknown state kind");
  meta.kind = kind == 0 ? StateKind::pure : StateKind::density;
  meta.spin_dim = static_cast<int>(r.get<std::uint32_t>());
  meta.fock_dim = static_cast<int>(r.get<std::uint32_t>());
  const auto count = r.get<std::uint64_t>();
  const std::uint64_t dim = std::uint64_t(meta.spin_dim) * std::uint64_t(meta.fock_dim);
  if (count != (kind == 0 ? dim : dim * dim)) throw SnapshotError("snapshot payload size mismatch");
  if (count * sizeof(Complex) + r.position() + sizeof(std::uint32_t) > bytes.size())
    throw SnapshotError("snapshot truncated");

  const size_t payload_at = r.position();
  const size_t crc_at = payload_at + count * sizeof(Complex);
  Reader tail(std::string_view(bytes).substr(crc_at));
  const auto stored = tail.get<std::uint32_t>();
  if (stored != crc_of(std::string_view(bytes).substr(0, crc_at)))
    throw SnapshotError("snapshot checksum mismatch");
  if (bytes.size() != crc_at + sizeof(std::uint32_t)) throw SnapshotError("snapshot has trailing bytes");

  if (info) *info = meta;
  const Index n = static_cast<Index>(dim);
  if (meta.kind == StateKind::pure) {
    CVector psi(n);
    std::memcpy(psi.data(), bytes.data() + payload_at, count * sizeof(Complex));
    return QuantumState::pure(meta.spin_dim, meta.fock_dim, std::move(psi), meta.t, meta.lambda);
  }
  CMatrix rho(n, n);
  std::memcpy(rho.data(), bytes.data() + payload_at, count * sizeof(Complex));
  return QuantumState::density(meta.spin_dim, meta.fock_dim, std::move(rho), meta.t, meta.lambda);
}

QuantumState read_snapshot(const std::filesystem::path& path, const SystemParams& expected) {
  SnapshotInfo info;
  QuantumState state = read_snapshot(path, &info);
  if (info.params_hash != params_hash(expected))
    throw SnapshotError("snapshot was written for different system parameters");
  return state;
}

std::string read_csv_config_hash(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  const std::string prefix = "# config_hash=";
  if (line.rfind(prefix, 0) != 0) throw ConfigError(path.string() + " carries no config hash");
  return line.substr(prefix.size());
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<ObservableRecord>& records,
                          const std::string& config_hash) {
  std::ofstream out = open_csv(path, config_hash);
  out << "t,lambda,S_N,negativity,log_negativity,parity,jx,jz,n_photons,tail_weight\n";
  for (const ObservableRecord& r : records) {
    out << format_double(r.t) << ',' << format_double(r.lambda) << ',' << format_double(r.entropy) << ','
        << format_double(r.negativity) << ',' << format_double(r.log_negativity) << ','
        << format_double(r.parity) << ',' << format_double(r.jx) << ',' << format_double(r.jz) << ','
        << format_double(r.n_photons) << ',' << format_double(r.tail_weight) << '\n';
  }
}

void write_field_wigner_csv(const std::filesystem::path& path, const PlanarWignerGrid& grid,
                            const std::string& config_hash) {
  std::ofstream out = open_csv(path, config_hash);
  out << "x,p,W\n";
  for (Index i = 0; i < grid.x_values.size(); ++i)
    for (Index j = 0; j < grid.p_values.size(); ++j)
      out << format_double(grid.x_values(i)) << ',' << format_double(grid.p_values(j)) << ','
          << format_double(grid.values(i, j)) << '\n';
}

void write_spin_wigner_csv(const std::filesystem::path& path, const SphericalWignerGrid& grid,
                           const std::string& config_hash) {
  std::ofstream out = open_csv(path, config_hash);
  out << "theta,phi,W\n";
  for (Index i = 0; i < grid.theta_values.size(); ++i)
    for (Index j = 0; j < grid.phi_values.size(); ++j)
      out << format_double(grid.theta_values(i)) << ',' << format_double(grid.phi_values(j)) << ','
          << format_double(grid.values(i, j)) << '\n';
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepGrid>& sweeps,
                     const std::string& config_hash) {
  std::ofstream out = open_csv(path, config_hash);
  out << "N,log2_upsilon,lambda,S_N,logneg\n";
  for (const SweepGrid& g : sweeps)
    for (size_t i = 0; i < g.upsilon_values.size(); ++i)
      for (size_t k = 0; k < g.lambda_checkpoints.size(); ++k)
        out << g.n_qubits << ',' << format_double(std::log2(g.upsilon_values[i])) << ','
            << format_double(g.lambda_checkpoints[k]) << ','
            << format_double(g.entropy(static_cast<Index>(i), static_cast<Index>(k))) << ','
            << format_double(g.log_negativity(static_cast<Index>(i), static_cast<Index>(k))) << '\n';
}

void merge_sweep_csvs(const std::vector<std::filesystem::path>& inputs, const std::filesystem::path& output) {
  if (inputs.empty()) throw ConfigError("nothing to merge");
  const std::string hash = read_csv_config_hash(inputs.front());
  for (const auto& p : inputs)
    if (read_csv_config_hash(p) != hash)
      throw ConfigError("refusing to merge " + p.string() + ": config hash differs from " +
                        inputs.front().string());
  std::ostringstream merged;
  merged << "# config_hash=" << hash << '\n';
  for (size_t f = 0; f < inputs.size(); ++f) {
    std::ifstream in(inputs[f]);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    if (f == 0) merged << line << '\n';
    while (std::getline(in, line))
      if (!line.empty()) merged << line << '\n';
  }
  write_text_file(output, merged.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace dicke::io
