// Command-line surface: validate | quantum-value | simulate | nc-bound |
// similarity.  Every command is deterministic given its flags and writes a
// manifest next to any artifact it produces.
//
// Exit codes: 0 success (including soft warnings), 2 usage or input error
// (including a validation verdict of FAIL on well-formed input), 3 broken
// internal invariant.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seqctx/json_io.hpp"
#include "seqctx/linalg.hpp"
#include "seqctx/measurement.hpp"
#include "seqctx/ontic.hpp"
#include "seqctx/quantum.hpp"
#include "seqctx/scenario.hpp"
#include "seqctx/sim.hpp"

namespace {

using namespace seqctx;

std::string fmt17(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw input_error("trailing junk");
    } catch (const std::exception&) {
      throw input_error("cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw input_error("expected a comma-separated list of numbers");
  return out;
}

CycleScenario scenario_for(int n, const std::optional<std::string>& probs_csv) {
  std::vector<double> probs;
  if (probs_csv.has_value()) {
    probs = parse_csv_doubles(*probs_csv);
    if (static_cast<int>(probs.size()) != n) {
      throw input_error("--probs needs exactly " + std::to_string(n) + " entries");
    }
  }
  if (n == 5) {
    return probs.empty() ? build_kcbs_scenario() : build_kcbs_scenario(probs);
  }
  CycleScenario uniform = build_ncycle_scenario(n);
  if (probs.empty()) return uniform;
  std::vector<Ket> kets;
  kets.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) kets.push_back(uniform.ket(i));
  return CycleScenario::make(std::move(kets), std::move(probs));
}

void write_with_manifest(const std::string& out_dir, io::RunManifest manifest,
                         const std::vector<std::pair<std::string, std::string>>& files) {
  std::filesystem::create_directories(out_dir);
  for (const auto& [name, text] : files) {
    io::write_text_file(out_dir + "/" + name, text);
    manifest.outputs.push_back(name);
  }
  manifest.outputs.push_back("manifest.json");
  io::write_text_file(out_dir + "/manifest.json", io::manifest_to_json(manifest));
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const std::string& file, bool use_kcbs, int ncycle) {
  CycleScenario sc = [&] {
    if (use_kcbs) return build_kcbs_scenario();
    if (ncycle > 0) return build_ncycle_scenario(ncycle);
    if (file.empty()) throw input_error("give a scenario file, --kcbs, or --n");
    return io::scenario_from_json_unchecked(io::read_text_file(file));
  }();

  bool pass = true;
  auto verdict = [&](bool ok) {
    pass = pass && ok;
    return ok ? "ok" : "FAIL";
  };

  std::cout << "settings: " << sc.n() << "\n";

  bool dims_ok = true;
  double norm_residual = 0.0;
  for (int i = 0; i < sc.n(); ++i) {
    dims_ok = dims_ok && sc.ket(i).dim() == 3;
    norm_residual = std::max(norm_residual, std::abs(sc.ket(i).norm() - 1.0));
  }
  std::cout << "ket dimension 3: " << verdict(dims_ok) << "\n";
  std::cout << "ket normalization residual: " << fmt17(norm_residual) << " "
            << verdict(norm_residual <= kSpectrumTol) << "\n";

  double prob_sum = 0.0, prob_min = 0.0;
  for (double p : sc.probs()) {
    prob_sum += p;
    prob_min = std::min(prob_min, p);
  }
  std::cout << "probability sum residual: " << fmt17(std::abs(prob_sum - 1.0)) << " "
            << verdict(std::abs(prob_sum - 1.0) <= kStructureTol && prob_min >= 0.0) << "\n";

  if (!dims_ok) {
    std::cout << "adjacency and device checks skipped (wrong ket dimension)\n";
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 2;
  }

  double adjacent = 0.0;
  for (int i = 0; i < sc.n(); ++i) {
    adjacent = std::max(adjacent, std::abs(inner_product(sc.ket(i), sc.ket(sc.next(i)))));
  }
  std::cout << "max adjacent overlap |<v_i|v_{i+1}>|: " << fmt17(adjacent) << " "
            << verdict(adjacent <= kSpectrumTol) << "\n";

  try {
    const LabeledPovm device = build_config1(sc);
    HermitianOperator sum_e = HermitianOperator::zero(3);
    for (const LabeledEffect& e : device.effects()) {
      if (e.label != "K") sum_e = sum_e + e.op;
    }
    const std::vector<double> spectrum = eigenvalues(sum_e);
    std::cout << "sum of direct effects, eigenvalues:";
    for (double v : spectrum) std::cout << " " << fmt17(v);
    std::cout << " " << verdict(spectrum.back() <= 1.0 + kSpectrumTol) << "\n";

    const HermitianOperator completion = device.find("K");
    const std::vector<double> kspec = eigenvalues(completion);
    std::cout << "completion effect eigenvalues:";
    for (double v : kspec) std::cout << " " << fmt17(v);
    std::cout << " " << verdict(kspec.front() >= -kSpectrumTol) << "\n";

    // Informational: the complement definition versus the alternative
    // expression 2 sum_i p_i K_i.  They agree only for special probability
    // vectors, so the distance is reported, not gated on.
    const double diff =
        (completion - settingwise_completion_effect(sc)).matrix().max_abs();
    std::cout << "completion diagnostic |complement - 2*sum p_i K_i|: " << fmt17(diff)
              << " (informational)\n";
  } catch (const input_error& e) {
    std::cout << "device construction: FAIL (" << e.what() << ")\n";
    pass = false;
  }

  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 2;
}

// ---------------------------------------------------------------------------
// quantum-value

int cmd_quantum_value(int n, const std::optional<std::string>& probs_csv,
                      const std::string& out_dir) {
  const CycleScenario sc = scenario_for(n, probs_csv);
  const DensityState initial = DensityState::maximally_mixed(3);
  const ConditionalTable table = conditional_table(sc, initial);

  std::cout << "conditional table p(second = column | first = row), initial state I/3\n";
  std::cout << std::setw(6) << "";
  for (const std::string& label : table.labels) std::cout << std::setw(10) << label;
  std::cout << "\n";
  std::cout << std::fixed << std::setprecision(6);
  for (size_t j = 0; j < table.labels.size(); ++j) {
    std::cout << std::setw(6) << table.labels[j];
    for (size_t i = 0; i < table.labels.size(); ++i) {
      const double v = table.rows[j][i];
      if (v < 0.0) {
        std::cout << std::setw(10) << "n/a";
      } else {
        std::cout << std::setw(10) << v;
      }
    }
    std::cout << "\n";
  }
  std::cout.unsetf(std::ios::fixed);
  std::cout << std::setprecision(6);

  const double c = contextuality_value(sc);
  std::cout << "C = " << fmt17(c) << "\n";

  bool uniform = true;
  for (double p : sc.probs()) uniform = uniform && std::abs(p - 1.0 / sc.n()) <= kStructureTol;
  std::optional<double> closed;
  if (sc.n() == 5 && uniform) {
    closed = closed_form_value();
    std::cout << "closed form 2(4 - sqrt(5)) = " << fmt17(*closed) << ", residual "
              << fmt17(std::abs(c - *closed)) << "\n";
  }

  if (!out_dir.empty()) {
    std::ostringstream doc;
    doc << "{\n  \"n\": " << sc.n() << ",\n  \"c_value\": " << fmt17(c);
    if (closed.has_value()) {
      doc << ",\n  \"closed_form\": " << fmt17(*closed) << ",\n  \"residual\": "
          << fmt17(std::abs(c - *closed));
    }
    doc << "\n}\n";
    io::RunManifest manifest;
    manifest.command = "quantum-value";
    manifest.parameters = {{"n", std::to_string(n)},
                           {"probs", probs_csv.value_or("uniform")},
                           {"out", out_dir}};
    write_with_manifest(out_dir, manifest, {{"quantum_value.json", doc.str()}});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(std::uint64_t shots, std::uint64_t seed, const std::string& state,
                 int workers, const std::string& out_dir) {
  SimConfig cfg{build_kcbs_scenario(), DensityState::maximally_mixed(3), shots, seed, workers};
  if (state != "mixed") {
    cfg.initial_state = DensityState::pure(io::ket_from_json(io::read_text_file(state)).normalized());
  }
  const SimResult result = run_sequential(cfg);

  io::RunManifest manifest;
  manifest.command = "simulate";
  manifest.parameters = {{"shots", std::to_string(shots)},
                         {"seed", std::to_string(seed)},
                         {"state", state},
                         {"out", out_dir}};
  manifest.seed = seed;
  write_with_manifest(out_dir, manifest,
                      {{"result.json", io::sim_result_to_json(result)},
                       {"counts.csv", io::counts_csv(result)}});

  const double exact = contextuality_value(cfg.scenario);
  std::cout << "shots: " << shots << "  seed: " << seed << "\n";
  std::cout << "C estimate = " << fmt17(result.c_estimate) << " +/- " << fmt17(result.c_stderr)
            << "\n";
  std::cout << "exact C    = " << fmt17(exact) << "\n";
  if (result.c_stderr > 0.0) {
    std::cout << "z-score    = " << fmt17((result.c_estimate - exact) / result.c_stderr) << "\n";
  }
  if (result.insufficient_statistics) {
    std::cout << "warning: insufficient statistics; " << result.undefined_cells.size()
              << " conditional cell(s) undefined at these counts\n";
  }
  std::cout << "wrote " << out_dir << "/result.json, counts.csv, manifest.json\n";
  return 0;
}

// ---------------------------------------------------------------------------
// nc-bound

ConstraintMode mode_from_name(const std::string& name) {
  ConstraintMode mode;
  if (name == "paper-faithful") {
    mode.exhaustive = true;
    mode.overlap_cap = true;
  } else if (name == "exhaustive") {
    mode.exhaustive = true;
  } else if (name == "capped") {
    mode.overlap_cap = true;
  } else if (name == "equal-overlap") {
    mode.overlap_cap = true;
    mode.equal_overlap = true;
  } else if (name == "unconstrained-overlap") {
    // core constraints only
  } else {
    throw input_error("unknown mode: " + name);
  }
  return mode;
}

int cmd_nc_bound(int ontic_states, int restarts, const std::string& mode_name, int iters,
                 double tol, std::uint64_t seed, int workers, const std::string& start_grid,
                 bool normalized, const std::string& out_dir) {
  const CycleScenario sc = build_kcbs_scenario();
  OptimizerConfig cfg;
  cfg.ontic_states = ontic_states;
  cfg.restarts = restarts;
  cfg.mode = mode_from_name(mode_name);
  cfg.outer_iters = iters;
  cfg.tol = tol;
  cfg.seed = seed;
  cfg.workers = workers;
  if (!start_grid.empty()) cfg.start_grid = parse_csv_doubles(start_grid);

  const OptResult result = maximize_C(sc, cfg);
  const ConstraintReport report = check_constraints(result.best_model, sc, cfg.mode, tol);
  const BoundChainReport chain = verify_bound_chain(result.best_model, sc, tol);

  io::RunManifest manifest;
  manifest.command = "nc-bound";
  manifest.parameters = {{"ontic-states", std::to_string(ontic_states)},
                         {"restarts", std::to_string(restarts)},
                         {"mode", mode_name},
                         {"iters", std::to_string(iters)},
                         {"tol", fmt17(tol)},
                         {"seed", std::to_string(seed)},
                         {"start-grid", start_grid},
                         {"out", out_dir}};
  manifest.seed = seed;
  write_with_manifest(out_dir, manifest,
                      {{"model.json", io::model_to_json(result.best_model)},
                       {"constraint_report.json", io::constraint_report_to_json(report)},
                       {"bound_chain.json", io::bound_chain_to_json(chain)},
                       {"opt_result.json", io::opt_result_to_json(result)}});

  std::cout << "mode: " << mode_name << "  ontic states: " << ontic_states
            << "  restarts: " << restarts << "\n";
  if (result.feasible) {
    std::cout << "best feasible C = " << fmt17(result.best_value) << "\n";
    std::cout << "margin to noncontextual bound (3.20 - C) = "
              << fmt17(kNoncontextualBound - result.best_value) << "\n";
  } else {
    std::cout << "feasible = false: no restart satisfied the constraints in this mode\n";
    std::cout << "best infeasible candidate C = " << fmt17(result.best_value)
              << " (worst violation " << fmt17(report.worst_violation) << ")\n";
  }
  if (normalized) {
    std::cout << "normalized-variant value (diagnostic only) = "
              << fmt17(evaluate_C_normalized(result.best_model, sc)) << "\n";
  }
  std::cout << "wrote " << out_dir
            << "/model.json, constraint_report.json, bound_chain.json, opt_result.json, "
               "manifest.json\n";
  return 0;
}

// ---------------------------------------------------------------------------
// similarity

int cmd_similarity(double s) {
  const QubitZxExample ex = zx_example(s);
  auto povm_of = [](const std::vector<HermitianOperator>& effects, const std::string& prefix) {
    std::vector<LabeledEffect> labeled;
    for (size_t k = 0; k < effects.size(); ++k) {
      labeled.push_back(LabeledEffect{prefix + std::to_string(k), effects[k]});
    }
    return LabeledPovm::complete(std::move(labeled));
  };
  const LabeledPovm mz = povm_of(ex.z_effects, "Z");
  const LabeledPovm mx = povm_of(ex.x_effects, "X");
  const LabeledPovm mzx = povm_of(ex.zx_effects, "ZX");

  auto print_result = [](const std::string& title, const SimilarityResult& r) {
    std::cout << title << ": " << (r.matched ? "similar" : "not similar");
    if (r.matched && r.scale.has_value()) std::cout << ", scale = " << fmt17(*r.scale);
    std::cout << "\n";
    for (const auto& [a, b] : r.outcome_pairing) std::cout << "  " << a << " -> " << b << "\n";
  };

  const SimilarityResult rz = check_similarity(mz, mzx);
  const SimilarityResult rx = check_similarity(mx, mzx);
  print_result("M_Z vs M_ZX(s=" + fmt17(s) + ")", rz);
  print_result("M_X vs M_ZX(s=" + fmt17(s) + ")", rx);

  if (!rz.matched || !rx.matched || !rz.scale.has_value() || !rx.scale.has_value()) {
    std::cerr << "internal error: interpolated device failed to match its parents\n";
    return 3;
  }
  const double err_z = std::abs(*rz.scale - s);
  const double err_x = std::abs(*rx.scale - (1.0 - s));
  std::cout << "recovered scales (s, 1-s) = (" << fmt17(*rz.scale) << ", " << fmt17(*rx.scale)
            << "), errors (" << fmt17(err_z) << ", " << fmt17(err_x) << ")\n";
  if (err_z > 1e-12 || err_x > 1e-12) {
    std::cerr << "internal error: recovered scales disagree with the construction\n";
    return 3;
  }
  if (s == 1.0) std::cout << "s = 1: similarity to M_Z is an equivalence (scale 1)\n";
  if (s == 0.0) std::cout << "s = 0: similarity to M_X is an equivalence (scale 1)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential-measurement contextuality toolkit"};
  app.require_subcommand(1);

  // validate
  std::string val_file;
  bool val_kcbs = false;
  int val_n = 0;
  CLI::App* validate = app.add_subcommand("validate", "Check a scenario and its device POVM");
  validate->add_option("file", val_file, "Scenario JSON file");
  validate->add_flag("--kcbs", val_kcbs, "Validate the built-in pentagram scenario");
  validate->add_option("--n", val_n, "Validate the built-in odd n-cycle scenario");

  // quantum-value
  int qv_n = 5;
  std::string qv_probs;
  std::string qv_out;
  CLI::App* quantum =
      app.add_subcommand("quantum-value", "Exact conditional table and the sequential value C");
  quantum->add_option("--n", qv_n, "Cycle length (odd, >= 5)");
  quantum->add_option("--probs", qv_probs, "Comma-separated setting probabilities");
  quantum->add_option("--out", qv_out, "Directory for quantum_value.json + manifest");

  // simulate
  std::uint64_t sim_shots = 1000000;
  std::uint64_t sim_seed = 1;
  std::string sim_state = "mixed";
  std::string sim_out = ".";
  int sim_workers = 0;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo of the two-step sequential experiment");
  simulate->add_option("--shots", sim_shots, "Number of two-draw shots");
  simulate->add_option("--seed", sim_seed, "Master seed");
  simulate->add_option("--state", sim_state, "'mixed' or a ket JSON file");
  simulate->add_option("--workers", sim_workers, "Worker threads (0 = auto)");
  simulate->add_option("--out", sim_out, "Output directory");

  // nc-bound
  int nc_states = 4;
  int nc_restarts = 64;
  std::string nc_mode = "paper-faithful";
  int nc_iters = 30;
  double nc_tol = kFeasibilityTol;
  std::uint64_t nc_seed = 1;
  int nc_workers = 0;
  std::string nc_grid;
  std::string nc_out = ".";
  bool nc_normalized = false;
  CLI::App* ncb = app.add_subcommand(
      "nc-bound", "Search noncontextual ontic models for the maximal sequential value");
  ncb->add_option("--ontic-states", nc_states, "Number of ontic states");
  ncb->add_option("--restarts", nc_restarts, "Multistart restarts");
  ncb->add_option("--mode", nc_mode, "Constraint mode")
      ->check(CLI::IsMember(
          {"paper-faithful", "exhaustive", "capped", "equal-overlap", "unconstrained-overlap"}));
  ncb->add_option("--iters", nc_iters, "Outer iterations per restart");
  ncb->add_option("--tol", nc_tol, "Feasibility tolerance");
  ncb->add_option("--seed", nc_seed, "Master seed");
  ncb->add_option("--workers", nc_workers, "Worker threads (0 = auto)");
  ncb->add_option("--start-grid", nc_grid, "Comma-separated start values for responses");
  ncb->add_flag("--normalized", nc_normalized, "Also print the normalized-conditional variant");
  ncb->add_option("--out", nc_out, "Output directory");

  // similarity
  double sim_s = 0.5;
  CLI::App* similarity =
      app.add_subcommand("similarity", "Scale recovery for the interpolated qubit device");
  similarity->add_option("--s", sim_s, "Interpolation weight in [0, 1]")->required();

  try {
    app.parse(argc, argv);
    if (validate->parsed()) return cmd_validate(val_file, val_kcbs, val_n);
    if (quantum->parsed()) {
      return cmd_quantum_value(qv_n, qv_probs.empty() ? std::nullopt : std::optional(qv_probs),
                               qv_out);
    }
    if (simulate->parsed()) {
      return cmd_simulate(sim_shots, sim_seed, sim_state, sim_workers, sim_out);
    }
    if (ncb->parsed()) {
      return cmd_nc_bound(nc_states, nc_restarts, nc_mode, nc_iters, nc_tol, nc_seed, nc_workers,
                          nc_grid, nc_normalized, nc_out);
    }
    if (similarity->parsed()) return cmd_similarity(sim_s);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
