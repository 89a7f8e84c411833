#pragma once

#include <array>
#include <cstdint>

namespace mlmc {

// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept;

// Inverse standard normal CDF (Wichura AS241, ~1e-16 relative accuracy).
double normal_quantile(double p);
double normal_cdf(double x) noexcept;
double normal_pdf(double x) noexcept;

// Counter-based stream for one sample, keyed by (seed, level, sample index).
// The k-th draw is a pure function of those three values and k, so samples
// can be produced in any order or on any thread.
class Stream {
 public:
  Stream(std::uint64_t seed, int level, std::uint64_t index) noexcept;

  // Uniform in (0,1), never 0 or 1.
  double uniform() noexcept;
  double normal() noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint32_t level_;
  std::uint64_t index_;
  std::uint32_t block_ = 0;
  std::array<double, 2> buf_{};
  int pos_ = 2;
};

}  // namespace mlmc
