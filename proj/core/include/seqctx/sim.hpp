#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "seqctx/measurement.hpp"
#include "seqctx/quantum.hpp"
#include "seqctx/rng.hpp"
#include "seqctx/scenario.hpp"

// Seeded Monte Carlo of the two-step sequential experiment on the
// configuration-1 device.
//
// Shot layout is fixed: shots are split into shards of kShardSize, shard s
// simulates shots [s*kShardSize, ...) with an independent stream seeded by
// derive_stream_seed(seed, s), and shard counts are merged in shard order.
// Worker threads only decide which shards run when, never what they contain,
// so results are bit-identical for any worker count.

namespace seqctx {

inline constexpr std::uint64_t kShardSize = 1 << 16;

struct SimConfig {
  CycleScenario scenario;
  DensityState initial_state;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  // 0 = use SEQCTX_WORKERS if set, else hardware concurrency.
  int workers = 0;
};

struct SimResult {
  std::vector<std::string> labels;                     // E0..E{n-1}, K
  std::vector<std::uint64_t> first_counts;             // by label index
  std::vector<std::vector<std::uint64_t>> joint_counts;  // [first][second]
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;

  // Plug-in estimate of the conditional double sum: for every ordered pair of
  // non-completion labels, N(first=j, second=i) / N(first=j), summed.  Cells
  // whose first-outcome count is zero are excluded and listed below.
  double c_estimate = 0.0;
  // Per-cell binomial standard errors, sqrt(p(1-p)/N_j), summed in
  // quadrature over the same cells.
  double c_stderr = 0.0;
  bool insufficient_statistics = false;
  std::vector<std::pair<int, int>> undefined_cells;    // (first, second) indices
};

// One draw from the device given the current state; consumes exactly one
// uniform variate.  Throws std::invalid_argument if the outcome
// probabilities fail to sum to 1 within 1e-9.
std::string sample_outcome(const DensityState& rho, const LabeledPovm& device, SplitMix64& rng);

SimResult run_sequential(const SimConfig& cfg);

// Reads SEQCTX_WORKERS (positive integer) or falls back to the hardware
// concurrency; used wherever a worker count of 0 is passed.
int resolve_workers(int requested);

}  // namespace seqctx
