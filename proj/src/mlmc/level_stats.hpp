#pragma once

#include <cstdint>

namespace mlmc {

// Running sufficient statistics for one level. Central moments are updated
// with the one-pass Welford/Pebay recurrences; raw power sums are derived on
// demand so that the stored state stays well conditioned.
class LevelStats {
 public:
  LevelStats() = default;
  explicit LevelStats(int level) : level_(level) {}

  // Throws Error(sampling_failure) when g or cost is not finite.
  void add_sample(double g, double cost);
  void merge(const LevelStats& other);

  std::int64_t count() const noexcept { return n_; }
  double cost() const noexcept { return cost_; }
  int level() const noexcept { return level_; }
  void set_level(int level) noexcept { level_ = level; }

  // Power sums sum g^k, k = 1..4.
  double s1() const noexcept;
  double s2() const noexcept;
  double s3() const noexcept;
  double s4() const noexcept;

  // Central sums sum (g - mean)^k.
  double m2() const noexcept { return m2_; }
  double m3() const noexcept { return m3_; }
  double m4() const noexcept { return m4_; }

  // Require count >= 1 and count >= 2 respectively (insufficient_samples).
  double mean() const;
  double variance() const;  // m2 / count

  bool operator==(const LevelStats& o) const = default;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
  double cost_ = 0.0;
  int level_ = 0;
};

// Number of times a negative round-off variance was clamped to zero.
std::uint64_t variance_clamp_count() noexcept;

}  // namespace mlmc
