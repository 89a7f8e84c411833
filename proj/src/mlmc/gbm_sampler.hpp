#pragma once

#include <vector>

#include "mlmc/sampler.hpp"

namespace mlmc {

struct GbmParams {
  double drift = 0.05;
  double volatility = 0.2;
  double maturity = 1.0;
  double u0 = 1.0;
  double strike = 1.0;
  double scale = 10.0;
  bool discount = true;  // multiply the payoff by exp(-drift * maturity)
  int steps0 = 1;        // Euler steps on level 0

  nlohmann::json to_json() const;
  static GbmParams from_json(const nlohmann::json& j);
};

// Euler-Maruyama for du = mu u dt + sigma u dW with N_l = steps0 beta^l
// uniform steps and the call payoff scale * max(u(T) - strike, 0).
// omega of length N_r = N_l beta^k holds the Brownian path at resolution
// N_r as standard normals; coarser increments are sums of beta consecutive
// finer ones.
class GbmSampler final : public CoupledSampler {
 public:
  explicit GbmSampler(GbmParams p = {});

  const SamplerDescriptor& descriptor() const override { return desc_; }
  std::size_t outcome_size(int level) const override;
  double functional(int level, std::span<const double> omega) const override;
  double coupled(int level, std::span<const double> omega) const override;
  nlohmann::json params_json() const override { return p_.to_json(); }

  // Brownian increments on level l restricted from omega.
  std::vector<double> increments(int level, std::span<const double> omega) const;
  // Sums of beta consecutive increments.
  std::vector<double> coarsen(const std::vector<double>& fine) const;
  double payoff_from_increments(const std::vector<double>& dw) const;

  // Closed-form expectation of the (optionally discounted) payoff.
  static double exact_mean(const GbmParams& p);

 private:
  GbmParams p_;
  SamplerDescriptor desc_;
};

}  // namespace mlmc
