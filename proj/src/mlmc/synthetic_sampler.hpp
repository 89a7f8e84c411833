#pragma once

#include "mlmc/sampler.hpp"

namespace mlmc {

struct SyntheticParams {
  double q1 = 1.0;
  double q2 = 1.0;
  double qw = 1.0;
  double qs = 1.0;  // 0 gives noiseless level differences
  double gamma = 1.0;
  double h0 = 1.0;
  int beta = 2;
  double mean0 = 1.0;
  double var0 = 1.0;

  nlohmann::json to_json() const;
  static SyntheticParams from_json(const nlohmann::json& j);
};

// Gaussian level differences following the error models exactly:
// G_0 ~ N(mean0, var0), G_l ~ N(qw w_l(q1), qs / s_l(q2)). omega = Z_0..Z_l and
// level l reads Z_l only.
class SyntheticSampler final : public CoupledSampler {
 public:
  explicit SyntheticSampler(SyntheticParams p = {});

  const SamplerDescriptor& descriptor() const override { return desc_; }
  std::size_t outcome_size(int level) const override { return static_cast<std::size_t>(level) + 1; }
  double functional(int level, std::span<const double> omega) const override;
  double coupled(int level, std::span<const double> omega) const override;
  int max_level() const override { return 60; }
  nlohmann::json params_json() const override { return p_.to_json(); }

  double level_mean(int level) const;
  double level_variance(int level) const;

 private:
  SyntheticParams p_;
  SamplerDescriptor desc_;
};

}  // namespace mlmc
