#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "dicke/errors.hpp"
#include "dicke/io.hpp"
#include "run.hpp"

using namespace dicke;
using namespace dicke::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dicke_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> read_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  std::getline(in, line);  // hash
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

RunConfig parse(std::vector<std::string> args) { return *parse_config(args); }

RunReport run_quiet(const RunConfig& c) {
  std::ostringstream log;
  return run(c, log);
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(DICKE_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, MinimalSweepFileIsValid) {
  const fs::path dir = scratch("minimal");
  const fs::path f = write_file(dir / "run.ini", "mode = sweep\nn-qubits = 21\n");
  const RunConfig c = parse({"--config", f.string()});
  EXPECT_EQ(c.mode, Mode::sweep);
  EXPECT_EQ(c.params.n_qubits, 21);
  ASSERT_TRUE(c.sweep.has_value());
  EXPECT_EQ(c.sweep->n_values, std::vector<int>{21});
  EXPECT_TRUE(c.auto_n_max);
  EXPECT_EQ(c.sweep->upsilons().size(), 57u);
}

TEST(Config, InvalidFieldIsNamed) {
  try {
    parse({"evolve", "--lambda-d", "-1"});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("lambda-d"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse({"evolve", "-N", "0"}), ConfigError);
  EXPECT_THROW(parse({"evolve", "--upsilon", "1", "--upsilon-log2", "0"}), ConfigError);
  EXPECT_THROW(parse({"evolve", "--kappa", "0.1"}), ConfigError);
  EXPECT_THROW(parse({"phase-diagram", "--dlambda", "0.5", "--sweep-lambda-d", "0.8"}), ConfigError);
  EXPECT_NO_THROW(parse({"phase-diagram", "--dlambda", "0.1", "--sweep-lambda-d", "0.8,2.5"}));
}

TEST(Config, FlagOverridesFile) {
  const fs::path dir = scratch("override");
  const fs::path f = write_file(dir / "run.ini", "mode = evolve\nupsilon-log2 = -3\n");
  EXPECT_DOUBLE_EQ(parse({"--config", f.string()}).schedule.upsilon, 0.125);
  EXPECT_DOUBLE_EQ(parse({"--config", f.string(), "--upsilon-log2", "-1.55"}).schedule.upsilon, std::exp2(-1.55));
}

TEST(Config, UnknownKeyAndMissingModeFail) {
  const fs::path dir = scratch("unknown");
  const fs::path f = write_file(dir / "run.ini", "mode = evolve\nbogus-key = 3\n");
  EXPECT_THROW(parse({"--config", f.string()}), ConfigError);
  EXPECT_THROW(parse({"--bogus"}), ConfigError);
  EXPECT_THROW(parse({"-N", "5"}), ConfigError);
  EXPECT_THROW(parse({"teleport"}), ConfigError);
}

TEST(Config, HashIgnoresOutputDirAndThreads) {
  const RunConfig a = parse({"evolve", "-o", "x", "-j", "1"});
  const RunConfig b = parse({"evolve", "-o", "y", "-j", "4"});
  const RunConfig c = parse({"evolve", "--epsilon", "1.5"});
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
}

TEST(Config, EnvironmentSetsOutputDir) {
  const fs::path dir = scratch("env");
  const fs::path f = write_file(dir / "run.ini", "mode = evolve\n");
  ::setenv("DICKE_OUTPUT_DIR", (dir / "from_env").c_str(), 1);
  const RunConfig c = parse({"--config", f.string()});
  ::unsetenv("DICKE_OUTPUT_DIR");
  EXPECT_EQ(c.output_dir, dir / "from_env");
}

TEST(Run, EvolveWritesTrajectoryAndMetadata) {
  const fs::path dir = scratch("evolve");
  const RunConfig c = parse({"evolve", "-N", "9", "--upsilon-log2", "-4", "-o", dir.string()});
  const RunReport r = run_quiet(c);
  EXPECT_TRUE(r.converged);
  const auto rows = read_rows(dir / "trajectory.csv");
  ASSERT_EQ(rows.size(), 201u);
  EXPECT_EQ(rows.back()[1], "2");
  EXPECT_EQ(io::read_csv_config_hash(dir / "trajectory.csv"), config_hash(c));
  const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
  EXPECT_EQ(meta["config_hash"], config_hash(c));
  EXPECT_GT(meta["resolved_n_max"].get<int>(), 0);
}

TEST(Run, LindbladWithoutDampingMatchesEvolve) {
  const fs::path a = scratch("pure"), b = scratch("open");
  const std::vector<std::string> common{"-N", "5", "--upsilon", "1", "--lambda-d", "1", "--dlambda", "0.1",
                                        "--n-max", "24", "--tol", "1e-10"};
  std::vector<std::string> pa{"evolve", "-o", a.string()}, pb{"lindblad", "--kappa", "0", "-o", b.string()};
  pa.insert(pa.end(), common.begin(), common.end());
  pb.insert(pb.end(), common.begin(), common.end());
  run_quiet(parse(pa));
  run_quiet(parse(pb));
  const auto ra = read_rows(a / "trajectory.csv"), rb = read_rows(b / "trajectory.csv");
  ASSERT_EQ(ra.size(), rb.size());
  for (size_t k = 0; k < ra.size(); ++k) EXPECT_NEAR(std::stod(ra[k][3]), std::stod(rb[k][3]), 1e-6) << k;
}

TEST(Run, PhaseDiagramReportsBothExponents) {
  const fs::path dir = scratch("phase");
  const RunConfig c = parse({"phase-diagram", "--sweep-log2-min", "-3", "--sweep-log2-max", "1", "--sweep-count",
                             "5", "--sweep-lambda-d", "1.2,1.6,2.0", "--dlambda", "0.1", "--smoothing-window", "1",
                             "--negativity", "schmidt", "-o", dir.string()});
  EXPECT_EQ(c.sweep->n_values, (std::vector<int>{9, 15, 21}));
  run_quiet(c);
  const auto b = nlohmann::json::parse(slurp(dir / "boundary.json"));
  ASSERT_TRUE(b.contains("fitted_exponents"));
  EXPECT_TRUE(b["fitted_exponents"].contains("adiabatic"));
  EXPECT_TRUE(b["fitted_exponents"].contains("quench"));
  EXPECT_EQ(b["upsilon_min_of_n"].size(), 3u);
  EXPECT_EQ(b["upsilon_max_of_lambda"].size(), 3u);
  EXPECT_EQ(read_rows(dir / "phase_diagram.csv").size(), 3u * 5u * 21u);
}

TEST(Run, IdenticalConfigsGiveIdenticalFiles) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::vector<std::string> base{"sweep", "-N", "5", "--sweep-log2-min", "-2", "--sweep-log2-max", "1",
                                      "--sweep-count", "4", "--lambda-d", "1.5"};
  auto pa = base, pb = base;
  pa.insert(pa.end(), {"-o", a.string(), "-j", "1"});
  pb.insert(pb.end(), {"-o", b.string(), "-j", "2"});
  run_quiet(parse(pa));
  run_quiet(parse(pb));
  EXPECT_EQ(slurp(a / "sweep.csv"), slurp(b / "sweep.csv"));
}

TEST(Run, GroundStateAndWignerModes) {
  const fs::path dir = scratch("gs");
  run_quiet(parse({"ground-state", "-N", "4", "--lambda-d", "0.3", "-o", dir.string()}));
  const auto gs = nlohmann::json::parse(slurp(dir / "ground_state.json"));
  EXPECT_NEAR(gs["ground_state"]["parity"].get<double>(), 1.0, 1e-9);

  const fs::path wd = scratch("wigner");
  run_quiet(parse({"wigner", "-N", "3", "--upsilon", "2", "--lambda-d", "1", "--field-points", "21",
                   "--wigner-theta-points", "19", "--wigner-phi-points", "37", "-o", wd.string()}));
  EXPECT_EQ(read_rows(wd / "field_wigner.csv").size(), 21u * 21u);
  EXPECT_EQ(read_rows(wd / "spin_wigner.csv").size(), 19u * 37u);
}

TEST(Binary, ExitCodes) {
  const fs::path dir = scratch("exit");
  EXPECT_EQ(run_binary("--help"), kOk);
  EXPECT_EQ(run_binary("evolve --lambda-d -1"), kConfig);
  EXPECT_EQ(run_binary("evolve -N 4 --n-max 6 --upsilon 0.5 --lambda-d 2 --convergence-check -o " + dir.string()),
            kConvergence);
  EXPECT_EQ(run_binary("evolve -N 3 --upsilon 1 --lambda-d 0.5 -o " + dir.string()), kOk);
  EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
}
