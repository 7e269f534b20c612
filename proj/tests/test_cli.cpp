#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "seqctx/json_io.hpp"
#include "seqctx/linalg.hpp"
#include "seqctx/scenario.hpp"

// End-to-end checks of the installed binary: exit codes, stdout phrases, and
// byte-level reproducibility of the written artifacts.

namespace {

namespace fs = std::filesystem;

const char* kScratch = "cli_scratch";

struct CliRun {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

CliRun run_cli(const std::string& args) {
  static int counter = 0;
  fs::create_directories(kScratch);
  const std::string capture =
      std::string(kScratch) + "/capture_" + std::to_string(counter++) + ".txt";
  const std::string cmd = std::string(SEQCTX_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
  const int raw = std::system(cmd.c_str());

  CliRun r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(capture, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  r.output = os.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string scratch_path(const std::string& name) {
  fs::create_directories(kScratch);
  return std::string(kScratch) + "/" + name;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("simulate --no-such-flag").exit_code == 2);
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("validate --help").exit_code == 0);
}

TEST_CASE("validate accepts the built-in scenarios") {
  const CliRun kcbs = run_cli("validate --kcbs");
  CHECK(kcbs.exit_code == 0);
  CHECK(kcbs.output.find("PASS") != std::string::npos);
  CHECK(kcbs.output.find("completion diagnostic") != std::string::npos);

  CHECK(run_cli("validate --n 7").exit_code == 0);
}

TEST_CASE("validate accepts a well-formed scenario file") {
  const std::string path = scratch_path("good_scenario.json");
  seqctx::io::write_text_file(path, seqctx::io::scenario_to_json(seqctx::build_kcbs_scenario()));
  const CliRun r = run_cli("validate " + path);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("PASS") != std::string::npos);
}

TEST_CASE("validate fails a perturbed scenario file with diagnostics") {
  using seqctx::Complex;
  using seqctx::Ket;
  const seqctx::CycleScenario good = seqctx::build_kcbs_scenario();
  std::vector<Ket> kets;
  for (int i = 0; i < 5; ++i) kets.push_back(good.ket(i));
  kets[1] = Ket({kets[1][0] + Complex(0.02, 0.0), kets[1][1], kets[1][2]}).normalized();
  const seqctx::CycleScenario broken =
      seqctx::CycleScenario::make_unchecked(kets, std::vector<double>(5, 0.2));

  const std::string path = scratch_path("broken_scenario.json");
  seqctx::io::write_text_file(path, seqctx::io::scenario_to_json(broken));

  const CliRun r = run_cli("validate " + path);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("FAIL") != std::string::npos);
  CHECK(r.output.find("max adjacent overlap") != std::string::npos);
}

TEST_CASE("validate reports missing and malformed files as input errors") {
  const CliRun missing = run_cli("validate no_such_file.json");
  CHECK(missing.exit_code == 2);
  CHECK(missing.output.find("error:") != std::string::npos);

  const std::string path = scratch_path("malformed.json");
  seqctx::io::write_text_file(path, "{oops");
  CHECK(run_cli("validate " + path).exit_code == 2);
}

TEST_CASE("quantum-value prints the closed form") {
  const CliRun r = run_cli("quantum-value");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("3.5278640450004204") != std::string::npos);
  CHECK(r.output.find("closed form") != std::string::npos);
  CHECK(r.output.find("residual") != std::string::npos);

  const CliRun seven = run_cli("quantum-value --n 7");
  CHECK(seven.exit_code == 0);
  CHECK(seven.output.find("5.08191517050529") != std::string::npos);

  CHECK(run_cli("quantum-value --n 4").exit_code == 2);
  CHECK(run_cli("quantum-value --probs 0.5,0.5").exit_code == 2);
  CHECK(run_cli("quantum-value --probs 0.3,0.3,0.2,0.1,0.2").exit_code == 2);  // sums to 1.1
  CHECK(run_cli("quantum-value --probs 0.3,abc,0.2,0.1,0.1").exit_code == 2);
}

TEST_CASE("quantum-value writes an artifact directory on request") {
  const std::string dir = scratch_path("qv_out");
  const CliRun r = run_cli("quantum-value --out " + dir);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(fs::path(dir) / "quantum_value.json"));
  CHECK(fs::exists(fs::path(dir) / "manifest.json"));
  const std::string doc = slurp(fs::path(dir) / "quantum_value.json");
  CHECK(doc.find("3.5278640450004204") != std::string::npos);
}

TEST_CASE("simulate writes reproducible artifacts") {
  const std::string dir_a = scratch_path("sim_a");
  const std::string dir_b = scratch_path("sim_b");
  const std::string args = "simulate --shots 4096 --seed 9 --out ";

  const CliRun a = run_cli(args + dir_a);
  CHECK(a.exit_code == 0);
  CHECK(a.output.find("C estimate") != std::string::npos);
  CHECK(a.output.find("z-score") != std::string::npos);

  const CliRun b = run_cli(args + dir_b);
  CHECK(b.exit_code == 0);

  // Identical inputs give byte-identical results regardless of directory.
  CHECK(slurp(fs::path(dir_a) / "result.json") == slurp(fs::path(dir_b) / "result.json"));
  CHECK(slurp(fs::path(dir_a) / "counts.csv") == slurp(fs::path(dir_b) / "counts.csv"));

  // Rerunning into the same directory reproduces the manifest too.
  const std::string manifest_before = slurp(fs::path(dir_a) / "manifest.json");
  CHECK(run_cli(args + dir_a).exit_code == 0);
  CHECK(slurp(fs::path(dir_a) / "manifest.json") == manifest_before);
  CHECK(manifest_before.find("\"seed\": 9") != std::string::npos);
}

TEST_CASE("simulate honors workers and state flags") {
  const std::string dir_a = scratch_path("sim_w1");
  const std::string dir_b = scratch_path("sim_w3");
  CHECK(run_cli("simulate --shots 70000 --seed 4 --workers 1 --out " + dir_a).exit_code == 0);
  CHECK(run_cli("simulate --shots 70000 --seed 4 --workers 3 --out " + dir_b).exit_code == 0);
  CHECK(slurp(fs::path(dir_a) / "result.json") == slurp(fs::path(dir_b) / "result.json"));

  const std::string ket_path = scratch_path("state_v0.json");
  seqctx::io::write_text_file(ket_path,
                              seqctx::io::ket_to_json(seqctx::build_kcbs_scenario().ket(0)));
  const CliRun pure = run_cli("simulate --shots 2048 --seed 5 --state " + ket_path + " --out " +
                              scratch_path("sim_pure"));
  CHECK(pure.exit_code == 0);
  // A pure initial state leaves the neighbor rows empty at any shot count.
  CHECK(pure.output.find("insufficient statistics") != std::string::npos);

  CHECK(run_cli("simulate --state no_such_state.json --out " + scratch_path("sim_x")).exit_code ==
        2);
}

TEST_CASE("simulate flags starved statistics") {
  const CliRun r = run_cli("simulate --shots 3 --seed 1 --out " + scratch_path("sim_tiny"));
  CHECK(r.exit_code == 0);  // a warning, not an error
  CHECK(r.output.find("insufficient statistics") != std::string::npos);
}

TEST_CASE("nc-bound runs each mode") {
  const std::string base = "nc-bound --restarts 6 --seed 2 --out ";

  const CliRun faithful =
      run_cli(base + scratch_path("nc_pf") + " --ontic-states 2 --mode paper-faithful");
  CHECK(faithful.exit_code == 0);
  CHECK(faithful.output.find("feasible = false") != std::string::npos);
  CHECK(faithful.output.find("best infeasible candidate") != std::string::npos);

  const CliRun open_mode =
      run_cli(base + scratch_path("nc_open") + " --ontic-states 1 --mode unconstrained-overlap");
  CHECK(open_mode.exit_code == 0);
  CHECK(open_mode.output.find("best feasible C = 1.6") != std::string::npos);
  CHECK(open_mode.output.find("margin to noncontextual bound") != std::string::npos);

  for (const fs::path dir : {fs::path(scratch_path("nc_pf")), fs::path(scratch_path("nc_open"))}) {
    CHECK(fs::exists(dir / "model.json"));
    CHECK(fs::exists(dir / "constraint_report.json"));
    CHECK(fs::exists(dir / "bound_chain.json"));
    CHECK(fs::exists(dir / "opt_result.json"));
    CHECK(fs::exists(dir / "manifest.json"));
  }
  const std::string opt_doc = slurp(fs::path(scratch_path("nc_pf")) / "opt_result.json");
  CHECK(opt_doc.find("\"feasible\": false") != std::string::npos);

  CHECK(run_cli("nc-bound --mode bogus --out " + scratch_path("nc_bad")).exit_code == 2);

  const CliRun normalized = run_cli(base + scratch_path("nc_norm") +
                                    " --ontic-states 1 --mode capped --normalized");
  CHECK(normalized.exit_code == 0);
  CHECK(normalized.output.find("diagnostic only") != std::string::npos);
}

TEST_CASE("similarity recovers the interpolation weight end to end") {
  const CliRun r = run_cli("similarity --s 0.25");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("recovered scales") != std::string::npos);
  CHECK(r.output.find("0.25") != std::string::npos);
  CHECK(r.output.find("Z0 -> ZX0") != std::string::npos);

  const CliRun edge = run_cli("similarity --s 1");
  CHECK(edge.exit_code == 0);
  CHECK(edge.output.find("equivalence") != std::string::npos);

  CHECK(run_cli("similarity --s 1.5").exit_code == 2);
  CHECK(run_cli("similarity --s -0.2").exit_code == 2);
  CHECK(run_cli("similarity").exit_code == 2);  // --s is required
}
