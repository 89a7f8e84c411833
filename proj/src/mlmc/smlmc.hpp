#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "mlmc/hierarchy.hpp"
#include "mlmc/level_stats.hpp"
#include "mlmc/run_record.hpp"
#include "mlmc/sampler.hpp"

namespace mlmc {

struct StandardConfig {
  double tol = 0.01;
  std::int64_t M_tilde = 25;
  double theta = 0.5;
  std::optional<double> q1;  // empty: the sampler's nominal weak rate
  double c_alpha = 2.0;
  bool reuse_samples = true;
  int L_max_abs = 20;

  void validate() const;
};

// max(|mean_L|, |mean_{L-1}| beta^-q1) / w_L(q1). Throws estimate_undefined
// for L < 2.
double qw_estimate_std(const LevelStats& last, const LevelStats& prev, const MeshHierarchy& hier,
                       double q1, int L);

// qw_hat h0^q1 beta^(-L q1) + C sqrt(sum Vbar_l / Mbar_l) over stats[0..L].
double error_estimate_std(double qw_hat, const MeshHierarchy& hier, double q1, int L,
                          std::span<const LevelStats> stats, double c_alpha);

RunRecord run_smlmc(const CoupledSampler& sampler, const StandardConfig& cfg, std::uint64_t seed,
                    int threads = 1);

}  // namespace mlmc
