#include "seqctx/sim.hpp"

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

namespace seqctx {

namespace {

// Probabilities of each device outcome for a fixed state, validated to sum
// to 1; shared by sample_outcome and the cached shot loop.
std::vector<double> outcome_distribution(const DensityState& rho, const LabeledPovm& device) {
  std::vector<double> probs;
  probs.reserve(static_cast<size_t>(device.size()));
  double sum = 0.0;
  for (const LabeledEffect& e : device.effects()) {
    const double p = outcome_probability(rho, e.op);
    probs.push_back(p);
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "outcome probabilities sum to " << sum << ", not 1";
    throw std::invalid_argument(os.str());
  }
  return probs;
}

// CDF inversion in label order; the final label absorbs rounding remainder.
int sample_index(const std::vector<double>& probs, SplitMix64& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

struct ShardCounts {
  std::vector<std::uint64_t> first;
  std::vector<std::vector<std::uint64_t>> joint;
};

// Exact per-first-outcome data reused across every shot: the first-outcome
// distribution and, for each first outcome with positive probability, the
// second-outcome distribution after the Lueders update.
struct CachedDistributions {
  std::vector<double> first;
  std::vector<std::vector<double>> second;  // empty when first prob ~ 0
};

CachedDistributions build_cache(const DensityState& initial, const LabeledPovm& device) {
  CachedDistributions cache;
  cache.first = outcome_distribution(initial, device);
  cache.second.resize(cache.first.size());
  for (int j = 0; j < device.size(); ++j) {
    if (cache.first[static_cast<size_t>(j)] < kStructureTol) continue;
    const DensityState post = luders_update(initial, device.effect(j).op);
    cache.second[static_cast<size_t>(j)] = outcome_distribution(post, device);
  }
  return cache;
}

ShardCounts run_shard(const CachedDistributions& cache, std::uint64_t shots,
                      std::uint64_t stream_seed) {
  const size_t m = cache.first.size();
  ShardCounts counts;
  counts.first.assign(m, 0);
  counts.joint.assign(m, std::vector<std::uint64_t>(m, 0));
  SplitMix64 rng(stream_seed);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const int a = sample_index(cache.first, rng);
    const int b = sample_index(cache.second[static_cast<size_t>(a)], rng);
    ++counts.first[static_cast<size_t>(a)];
    ++counts.joint[static_cast<size_t>(a)][static_cast<size_t>(b)];
  }
  return counts;
}

}  // namespace

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SEQCTX_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string sample_outcome(const DensityState& rho, const LabeledPovm& device,
                           SplitMix64& rng) {
  const std::vector<double> probs = outcome_distribution(rho, device);
  return device.effect(sample_index(probs, rng)).label;
}

SimResult run_sequential(const SimConfig& cfg) {
  const LabeledPovm device = build_config1(cfg.scenario);
  const CachedDistributions cache = build_cache(cfg.initial_state, device);
  const size_t m = static_cast<size_t>(device.size());

  SimResult res;
  for (const LabeledEffect& e : device.effects()) res.labels.push_back(e.label);
  res.first_counts.assign(m, 0);
  res.joint_counts.assign(m, std::vector<std::uint64_t>(m, 0));
  res.shots = cfg.shots;
  res.seed = cfg.seed;

  const std::uint64_t shard_count = (cfg.shots + kShardSize - 1) / kShardSize;
  const int workers = resolve_workers(cfg.workers);

  std::vector<ShardCounts> shards(static_cast<size_t>(shard_count));
  std::uint64_t next_shard = 0;
  std::mutex mtx;
  auto worker = [&]() {
    for (;;) {
      std::uint64_t s;
      {
        std::lock_guard<std::mutex> lock(mtx);
        if (next_shard >= shard_count) return;
        s = next_shard++;
      }
      const std::uint64_t begin = s * kShardSize;
      const std::uint64_t count = std::min(kShardSize, cfg.shots - begin);
      shards[static_cast<size_t>(s)] = run_shard(cache, count, derive_stream_seed(cfg.seed, s));
    }
  };
  if (workers <= 1 || shard_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int k = static_cast<int>(std::min<std::uint64_t>(
        static_cast<std::uint64_t>(workers), shard_count));
    pool.reserve(static_cast<size_t>(k));
    for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // Merge in shard order.
  for (const ShardCounts& sc : shards) {
    if (sc.first.empty()) continue;
    for (size_t j = 0; j < m; ++j) {
      res.first_counts[j] += sc.first[j];
      for (size_t i = 0; i < m; ++i) res.joint_counts[j][i] += sc.joint[j][i];
    }
  }

  // Plug-in estimate over ordered pairs of non-completion outcomes.
  const size_t n = m - 1;  // completion label sits last
  double estimate = 0.0;
  double variance = 0.0;
  for (size_t j = 0; j < n; ++j) {
    const std::uint64_t nj = res.first_counts[j];
    if (nj == 0) {
      // The first outcome never appeared although its exact probability is
      // positive: the conditional cells in this row are undefined.
      for (size_t i = 0; i < n; ++i) {
        res.undefined_cells.emplace_back(static_cast<int>(j), static_cast<int>(i));
      }
      res.insufficient_statistics = true;
      continue;
    }
    for (size_t i = 0; i < n; ++i) {
      const double phat =
          static_cast<double>(res.joint_counts[j][i]) / static_cast<double>(nj);
      estimate += phat;
      variance += phat * (1.0 - phat) / static_cast<double>(nj);
    }
  }
  res.c_estimate = estimate;
  res.c_stderr = std::sqrt(variance);
  return res;
}

}  // namespace seqctx
