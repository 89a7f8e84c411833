#pragma once

#include <cstdint>

#include "mlmc/level_stats.hpp"
#include "mlmc/sampler.hpp"

namespace mlmc {

inline constexpr std::int64_t kShardSize = 1024;

struct Batch {
  LevelStats stats;
  double seconds = 0.0;  // wall clock, not reproducible
};

// Draws samples first_index .. first_index + count - 1 on one level. Sample m
// uses Stream(seed, level, m). Work is cut into fixed shards that are merged
// in index order, so the result does not depend on the thread count.
Batch sample_level(const CoupledSampler& sampler, int level, std::uint64_t seed,
                   std::uint64_t first_index, std::int64_t count, int threads = 1);

// Cumulative per-level statistics for one run, with a running sample index
// per level so every draw gets a fresh stream.
class SamplePool {
 public:
  SamplePool(const CoupledSampler& sampler, std::uint64_t seed, int threads);

  // Draws count new samples, merges them into the cumulative stats and
  // returns the new batch alone.
  LevelStats draw(int level, std::int64_t count);
  // Tops the cumulative count on a level up to target.
  void top_up(int level, std::int64_t target);
  void ensure_levels(int num_levels);

  const std::vector<LevelStats>& cumulative() const { return cum_; }
  double model_work() const { return model_work_; }
  double measured_cost() const { return measured_; }

 private:
  const CoupledSampler& sampler_;
  std::uint64_t seed_;
  int threads_;
  std::vector<LevelStats> cum_;
  double model_work_ = 0.0;
  double measured_ = 0.0;
};

}  // namespace mlmc
