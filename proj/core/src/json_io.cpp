#include "seqctx/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace seqctx::io {

namespace {

using Json = nlohmann::ordered_json;

Json parse(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string(what) + ": invalid JSON: " + e.what());
  }
}

// Rethrows schema/typing errors as input errors with context.
template <typename Fn>
auto decoding(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const input_error&) {
    throw;
  } catch (const std::exception& e) {
    throw input_error(std::string(what) + ": " + e.what());
  }
}

Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw input_error("complex entries must be [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

Json ket_to_jobj(const Ket& v) {
  Json amps = Json::array();
  for (int i = 0; i < v.dim(); ++i) amps.push_back(complex_to_json(v[i]));
  return amps;
}

Ket ket_from_jobj(const Json& j) {
  if (!j.is_array() || j.empty()) throw input_error("a ket must be a nonempty array");
  std::vector<Complex> amps;
  amps.reserve(j.size());
  for (const Json& entry : j) amps.push_back(complex_from_json(entry));
  return Ket(std::move(amps));
}

Json matrix_to_jobj(const HermitianOperator& op) {
  Json rows = Json::array();
  for (int r = 0; r < op.dim(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < op.dim(); ++c) row.push_back(complex_to_json(op.entry(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

HermitianOperator matrix_from_jobj(const Json& j) {
  if (!j.is_array() || j.empty()) throw input_error("a matrix must be a nonempty array of rows");
  const int dim = static_cast<int>(j.size());
  SquareMatrix m(dim);
  for (int r = 0; r < dim; ++r) {
    const Json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw input_error("matrix rows must all have the matrix dimension");
    }
    for (int c = 0; c < dim; ++c) m.at(r, c) = complex_from_json(row[static_cast<size_t>(c)]);
  }
  try {
    return HermitianOperator::from_matrix(m);
  } catch (const std::invalid_argument& e) {
    throw input_error(std::string("matrix entry is not Hermitian: ") + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenario

std::string scenario_to_json(const CycleScenario& sc) {
  Json j;
  j["n"] = sc.n();
  Json kets = Json::array();
  for (int i = 0; i < sc.n(); ++i) kets.push_back(ket_to_jobj(sc.ket(i)));
  j["kets"] = std::move(kets);
  j["probs"] = sc.probs();
  return j.dump(2) + "\n";
}

namespace {

CycleScenario scenario_from_json_impl(const std::string& text, bool checked) {
  const Json j = parse(text, "scenario");
  return decoding("scenario", [&] {
    if (!j.contains("kets") || !j.contains("probs")) {
      throw input_error("scenario needs \"kets\" and \"probs\"");
    }
    std::vector<Ket> kets;
    for (const Json& k : j.at("kets")) kets.push_back(ket_from_jobj(k));
    std::vector<double> probs = j.at("probs").get<std::vector<double>>();
    if (j.contains("n") && j.at("n").get<int>() != static_cast<int>(kets.size())) {
      throw input_error("scenario \"n\" disagrees with the number of kets");
    }
    if (probs.size() != kets.size()) {
      throw input_error("scenario \"probs\" must have one entry per ket");
    }
    return checked ? CycleScenario::make(std::move(kets), std::move(probs))
                   : CycleScenario::make_unchecked(std::move(kets), std::move(probs));
  });
}

}  // namespace

CycleScenario scenario_from_json(const std::string& text) {
  return scenario_from_json_impl(text, true);
}

CycleScenario scenario_from_json_unchecked(const std::string& text) {
  return scenario_from_json_impl(text, false);
}

std::string ket_to_json(const Ket& v) { return ket_to_jobj(v).dump(2) + "\n"; }

Ket ket_from_json(const std::string& text) {
  const Json j = parse(text, "ket");
  return decoding("ket", [&] { return ket_from_jobj(j); });
}

// ---------------------------------------------------------------------------
// POVM

std::string povm_to_json(const LabeledPovm& povm) {
  Json j;
  j["dim"] = povm.dim();
  j["complete"] = povm.is_complete();
  Json effects = Json::array();
  for (const LabeledEffect& e : povm.effects()) {
    Json entry;
    entry["label"] = e.label;
    entry["matrix"] = matrix_to_jobj(e.op);
    effects.push_back(std::move(entry));
  }
  j["effects"] = std::move(effects);
  return j.dump(2) + "\n";
}

LabeledPovm povm_from_json(const std::string& text) {
  const Json j = parse(text, "povm");
  return decoding("povm", [&] {
    std::vector<LabeledEffect> effects;
    for (const Json& entry : j.at("effects")) {
      effects.push_back(LabeledEffect{entry.at("label").get<std::string>(),
                                      matrix_from_jobj(entry.at("matrix"))});
    }
    const bool complete = j.value("complete", true);
    return complete ? LabeledPovm::complete(std::move(effects))
                    : LabeledPovm::partial(std::move(effects));
  });
}

// ---------------------------------------------------------------------------
// Ontic model

std::string model_to_json(const OnticModel& m) {
  Json j;
  j["mu"] = m.mu();
  auto rows_to_json = [](const std::vector<OnticModel::Row>& rows) {
    Json out = Json::array();
    for (const OnticModel::Row& r : rows) out.push_back(std::vector<double>(r.begin(), r.end()));
    return out;
  };
  j["xi"] = rows_to_json(m.xi());
  j["xiK"] = rows_to_json(m.xi_completion());
  return j.dump(2) + "\n";
}

OnticModel model_from_json(const std::string& text) {
  const Json j = parse(text, "ontic model");
  return decoding("ontic model", [&] {
    auto rows_from_json = [](const Json& arr) {
      std::vector<OnticModel::Row> rows;
      for (const Json& r : arr) {
        if (!r.is_array() || r.size() != static_cast<size_t>(kCycleSize)) {
          throw input_error("response rows must have five entries");
        }
        OnticModel::Row row{};
        for (size_t i = 0; i < static_cast<size_t>(kCycleSize); ++i) row[i] = r[i].get<double>();
        rows.push_back(row);
      }
      return rows;
    };
    std::vector<double> mu = j.at("mu").get<std::vector<double>>();
    std::vector<OnticModel::Row> xi = rows_from_json(j.at("xi"));
    if (j.contains("xiK")) {
      return OnticModel::make(std::move(mu), std::move(xi), rows_from_json(j.at("xiK")));
    }
    return OnticModel::from_responses(std::move(mu), std::move(xi));
  });
}

// ---------------------------------------------------------------------------
// Simulation results

std::string sim_result_to_json(const SimResult& r) {
  Json j;
  j["labels"] = r.labels;
  j["shots"] = r.shots;
  j["seed"] = r.seed;
  j["first_counts"] = r.first_counts;
  j["joint_counts"] = r.joint_counts;
  j["c_estimate"] = r.c_estimate;
  j["c_stderr"] = r.c_stderr;
  j["insufficient_statistics"] = r.insufficient_statistics;
  Json cells = Json::array();
  for (const auto& [first, second] : r.undefined_cells) {
    cells.push_back(Json::array({first, second}));
  }
  j["undefined_cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

SimResult sim_result_from_json(const std::string& text) {
  const Json j = parse(text, "simulation result");
  return decoding("simulation result", [&] {
    SimResult r;
    r.labels = j.at("labels").get<std::vector<std::string>>();
    r.shots = j.at("shots").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.first_counts = j.at("first_counts").get<std::vector<std::uint64_t>>();
    r.joint_counts = j.at("joint_counts").get<std::vector<std::vector<std::uint64_t>>>();
    r.c_estimate = j.at("c_estimate").get<double>();
    r.c_stderr = j.at("c_stderr").get<double>();
    r.insufficient_statistics = j.at("insufficient_statistics").get<bool>();
    for (const Json& cell : j.at("undefined_cells")) {
      r.undefined_cells.emplace_back(cell.at(0).get<int>(), cell.at(1).get<int>());
    }
    return r;
  });
}

std::string counts_csv(const SimResult& r) {
  std::ostringstream os;
  os << "first";
  for (const std::string& label : r.labels) os << ',' << label;
  os << '\n';
  for (size_t row = 0; row < r.labels.size(); ++row) {
    os << r.labels[row];
    for (size_t col = 0; col < r.labels.size(); ++col) {
      os << ',' << r.joint_counts[row][col];
    }
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Reports

std::string constraint_report_to_json(const ConstraintReport& rep) {
  Json j;
  j["passed"] = rep.passed;
  j["tol"] = rep.tol;
  j["worst_violation"] = rep.worst_violation;
  j["completeness_ok"] = rep.completeness_ok;
  j["completeness_residual"] = rep.completeness_residual;
  j["adjacent_overlap"] = std::vector<double>(rep.adjacent_overlap.begin(), rep.adjacent_overlap.end());
  j["exhaustiveness_ok"] = rep.exhaustiveness_ok;
  j["exhaustiveness_residual"] = rep.exhaustiveness_residual;
  j["nn_overlaps"] = std::vector<double>(rep.nn_overlaps.begin(), rep.nn_overlaps.end());
  j["equal_overlap_residual"] = rep.equal_overlap_residual;
  return j.dump(2) + "\n";
}

std::string bound_chain_to_json(const BoundChainReport& rep) {
  Json j;
  j["l1"] = rep.l1;
  j["l2"] = rep.l2;
  j["l3"] = rep.l3;
  j["l4"] = std::vector<double>(rep.l4.begin(), rep.l4.end());
  j["l5"] = rep.l5;
  j["all_evaluated_ordered"] = rep.all_evaluated_ordered;
  Json steps = Json::array();
  for (const BoundChainStep& st : rep.steps) {
    Json s;
    s["from"] = st.from;
    s["to"] = st.to;
    s["premise"] = st.premise;
    s["premise_ok"] = st.premise_ok;
    if (st.ordered.has_value()) {
      s["ordered"] = *st.ordered;
    } else {
      s["ordered"] = nullptr;
      s["skipped_reason"] = "premise not satisfied by this model";
    }
    s["lhs"] = st.lhs;
    s["rhs"] = st.rhs;
    steps.push_back(std::move(s));
  }
  j["steps"] = std::move(steps);
  return j.dump(2) + "\n";
}

std::string opt_result_to_json(const OptResult& r) {
  Json j;
  j["best_value"] = r.best_value;
  j["feasible"] = r.feasible;
  j["restarts_used"] = r.restarts_used;
  j["margin_to_bound"] = kNoncontextualBound - r.best_value;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Manifest

std::string manifest_to_json(const RunManifest& m) {
  Json j;
  j["command"] = m.command;
  Json params = Json::object();
  for (const auto& [key, value] : m.parameters) params[key] = value;
  j["parameters"] = std::move(params);
  if (m.seed.has_value()) {
    j["seed"] = *m.seed;
  } else {
    j["seed"] = nullptr;
  }
  j["artifact_version"] = m.artifact_version;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  const Json j = parse(text, "manifest");
  return decoding("manifest", [&] {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    for (const auto& [key, value] : j.at("parameters").items()) {
      m.parameters.emplace_back(key, value.get<std::string>());
    }
    if (j.contains("seed") && !j.at("seed").is_null()) {
      m.seed = j.at("seed").get<std::uint64_t>();
    }
    m.artifact_version = j.at("artifact_version").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    return m;
  });
}

// ---------------------------------------------------------------------------
// Files

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw input_error("failed reading file: " + path);
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw input_error("cannot open file for writing: " + path);
  out << text;
  out.flush();
  if (!out) throw input_error("failed writing file: " + path);
}

}  // namespace seqctx::io
