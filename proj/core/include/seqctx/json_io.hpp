#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqctx/measurement.hpp"
#include "seqctx/ontic.hpp"
#include "seqctx/scenario.hpp"
#include "seqctx/sim.hpp"

// JSON (and one CSV) views of the library types.  The API is string-level so
// the JSON implementation stays private to this module.  All floating-point
// values are emitted in a shortest round-trip encoding, so parsing the text
// back reproduces every double bit-exactly; serialization is deterministic
// (fixed key order), so equal inputs give byte-identical text.

namespace seqctx::io {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Scenario document: {"n": int, "kets": [[[re, im] x dim] x n], "probs": [..]}.
std::string scenario_to_json(const CycleScenario& sc);
CycleScenario scenario_from_json(const std::string& text);
// Same parse without the scenario invariants (sizes must still agree), so the
// validate command can report the residuals of a deliberately broken file
// instead of refusing to load it.
CycleScenario scenario_from_json_unchecked(const std::string& text);

// A single ket: [[re, im] x dim].
std::string ket_to_json(const Ket& v);
Ket ket_from_json(const std::string& text);

// POVM document: {"dim": int, "complete": bool,
//                 "effects": [{"label": str, "matrix": [[[re, im] x d] x d]}]}.
std::string povm_to_json(const LabeledPovm& povm);
LabeledPovm povm_from_json(const std::string& text);

// Ontic model document: {"mu": [..], "xi": [[..5]], "xiK": [[..5]]}.
std::string model_to_json(const OnticModel& m);
OnticModel model_from_json(const std::string& text);

std::string sim_result_to_json(const SimResult& r);
SimResult sim_result_from_json(const std::string& text);

// The (n+1) x (n+1) joint count table as CSV: header "first,<labels...>",
// one row per first outcome.
std::string counts_csv(const SimResult& r);

std::string constraint_report_to_json(const ConstraintReport& rep);
std::string bound_chain_to_json(const BoundChainReport& rep);
// Optimizer outcome (the model itself is written separately).
std::string opt_result_to_json(const OptResult& r);

// Everything needed to reproduce a CLI run bit-exactly.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;  // flag, value
  std::optional<std::uint64_t> seed;
  std::string artifact_version = kArtifactVersion;
  std::vector<std::string> outputs;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

// Whole-file helpers; failures throw input_error with the path in the message.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace seqctx::io
