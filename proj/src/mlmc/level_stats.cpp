#include "mlmc/level_stats.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "mlmc/error.hpp"

namespace mlmc {

namespace {
std::atomic<std::uint64_t> g_clamps{0};

double clamp_nonneg(double x) {
  if (x < 0.0) {
    g_clamps.fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  return x;
}
}  // namespace

std::uint64_t variance_clamp_count() noexcept { return g_clamps.load(std::memory_order_relaxed); }

void LevelStats::add_sample(double g, double cost) {
  if (!std::isfinite(g) || !std::isfinite(cost) || cost < 0.0) {
    throw Error(ErrorCode::sampling_failure,
                "non-finite sample on level " + std::to_string(level_));
  }
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = g - mean_;
  const double dn = delta / n;
  const double dn2 = dn * dn;
  const double term1 = delta * dn * n1;
  mean_ += dn;
  m4_ += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2_ - 4.0 * dn * m3_;
  m3_ += term1 * dn * (n - 2.0) - 3.0 * dn * m2_;
  m2_ += term1;
  m2_ = clamp_nonneg(m2_);
  m4_ = clamp_nonneg(m4_);
  cost_ += cost;
}

void LevelStats::merge(const LevelStats& o) {
  if (o.n_ == 0) {
    cost_ += o.cost_;
    return;
  }
  if (n_ == 0) {
    const int lvl = level_;
    const double c = cost_;
    *this = o;
    level_ = lvl;
    cost_ += c;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  const double d2 = delta * delta;
  const double d3 = d2 * delta;
  const double d4 = d2 * d2;

  const double mean = mean_ + delta * nb / n;
  const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + o.m3_ + d3 * na * nb * (na - nb) / (n * n) +
                    3.0 * delta * (na * o.m2_ - nb * m2_) / n;
  const double m4 = m4_ + o.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) +
                    4.0 * delta * (na * o.m3_ - nb * m3_) / n;
  n_ += o.n_;
  mean_ = mean;
  m2_ = clamp_nonneg(m2);
  m3_ = m3;
  m4_ = clamp_nonneg(m4);
  cost_ += o.cost_;
}

double LevelStats::s1() const noexcept { return static_cast<double>(n_) * mean_; }

double LevelStats::s2() const noexcept { return m2_ + static_cast<double>(n_) * mean_ * mean_; }

double LevelStats::s3() const noexcept {
  const double n = static_cast<double>(n_);
  return m3_ + 3.0 * mean_ * m2_ + n * mean_ * mean_ * mean_;
}

double LevelStats::s4() const noexcept {
  const double n = static_cast<double>(n_);
  const double mu2 = mean_ * mean_;
  return m4_ + 4.0 * mean_ * m3_ + 6.0 * mu2 * m2_ + n * mu2 * mu2;
}

double LevelStats::mean() const {
  if (n_ < 1) {
    throw Error(ErrorCode::insufficient_samples,
                "level " + std::to_string(level_) + " has no samples");
  }
  return mean_;
}

double LevelStats::variance() const {
  if (n_ < 2) {
    throw Error(ErrorCode::insufficient_samples,
                "level " + std::to_string(level_) + " needs at least 2 samples for a variance");
  }
  return m2_ / static_cast<double>(n_);
}

}  // namespace mlmc
