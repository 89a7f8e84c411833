#include "mlmc/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mlmc {

namespace {

LevelStats run_shard(const CoupledSampler& sampler, int level, std::uint64_t seed,
                     std::uint64_t begin, std::uint64_t end) {
  LevelStats st(level);
  std::vector<double> scratch;
  for (std::uint64_t m = begin; m < end; ++m) {
    Stream s(seed, level, m);
    const Sample x = sampler.sample(level, s, scratch);
    st.add_sample(x.g, x.cost);
  }
  return st;
}

}  // namespace

Batch sample_level(const CoupledSampler& sampler, int level, std::uint64_t seed,
                   std::uint64_t first_index, std::int64_t count, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  Batch out;
  out.stats = LevelStats(level);
  if (count <= 0) return out;

  const std::uint64_t n = static_cast<std::uint64_t>(count);
  const std::uint64_t nshards = (n + kShardSize - 1) / kShardSize;
  std::vector<LevelStats> shards(nshards);
  auto bounds = [&](std::uint64_t s) {
    const std::uint64_t b = first_index + s * kShardSize;
    return std::pair{b, std::min(b + kShardSize, first_index + n)};
  };

  const int nt = static_cast<int>(std::min<std::uint64_t>(std::max(threads, 1), nshards));
  if (nt <= 1) {
    for (std::uint64_t s = 0; s < nshards; ++s) {
      const auto [b, e] = bounds(s);
      shards[s] = run_shard(sampler, level, seed, b, e);
    }
  } else {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) {
      pool.emplace_back([&] {
        for (std::uint64_t s; (s = next.fetch_add(1)) < nshards;) {
          try {
            const auto [b, e] = bounds(s);
            shards[s] = run_shard(sampler, level, seed, b, e);
          } catch (...) {
            std::lock_guard lk(err_mu);
            if (!err) err = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
  for (const auto& s : shards) out.stats.merge(s);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

SamplePool::SamplePool(const CoupledSampler& sampler, std::uint64_t seed, int threads)
    : sampler_(sampler), seed_(seed), threads_(threads) {}

void SamplePool::ensure_levels(int num_levels) {
  while (static_cast<int>(cum_.size()) < num_levels) {
    cum_.emplace_back(static_cast<int>(cum_.size()));
  }
}

LevelStats SamplePool::draw(int level, std::int64_t count) {
  ensure_levels(level + 1);
  auto& c = cum_[static_cast<std::size_t>(level)];
  Batch b = sample_level(sampler_, level, seed_, static_cast<std::uint64_t>(c.count()), count,
                         threads_);
  c.merge(b.stats);
  model_work_ += b.stats.cost();
  measured_ += b.seconds;
  return b.stats;
}

void SamplePool::top_up(int level, std::int64_t target) {
  ensure_levels(level + 1);
  const std::int64_t have = cum_[static_cast<std::size_t>(level)].count();
  if (target > have) draw(level, target - have);
}

}  // namespace mlmc
